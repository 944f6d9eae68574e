#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

struct PcaResult {
    std::vector<std::string> ids;
    Eigen::MatrixXd coords;                    // n x n_components
    std::vector<double> explained_variance_ratio;  // non-increasing
    Eigen::MatrixXd axes;                      // n_components x d loadings
};

// Projection onto the top principal axes of the mean-centered row matrix.
// Per-axis sign is canonicalized by forcing the largest-magnitude loading
// positive, so results are deterministic. Requires rank >= n_components.
PcaResult pca_project(const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& rows, int n_components = 3);

// Seeded label-balanced subset of ids (default 360 = the projection subset
// size); total must divide evenly across the labels present.
std::vector<std::string> balanced_subset(
    const std::vector<std::pair<std::string, std::string>>& id_labels,
    int total = 360, std::uint64_t seed = 17);

}  // namespace cxnprobe
