#include "cxnprobe/pca.hpp"

#include <algorithm>
#include <map>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/rng.hpp"

namespace cxnprobe {

PcaResult pca_project(const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& rows, int n_components) {
    const Eigen::Index n = rows.rows();
    const Eigen::Index d = rows.cols();
    if (static_cast<std::size_t>(n) != ids.size()) {
        throw DataError("pca_project: ids/rows size mismatch");
    }
    if (n < n_components) {
        throw DataError("pca_project: need at least " + std::to_string(n_components) +
                        " instances");
    }

    // The matrix must be able to carry n_components axes; numerically
    // deficient directions come back with a zero variance ratio instead of
    // an error (a 2-plane in a higher-dimensional space is legitimate data).
    if (d < n_components || n - 1 < n_components) {
        throw DataError("pca_project: rank bound " +
                        std::to_string(std::min<Eigen::Index>(d, n - 1)) +
                        " below requested components");
    }

    Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1 > 0 ? n - 1 : 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error("pca_project: eigendecomposition failed");
    }
    // Ascending eigenvalues from Eigen; take the top ones in descending order.
    const Eigen::VectorXd evals = solver.eigenvalues();
    const Eigen::MatrixXd evecs = solver.eigenvectors();
    const double total_var = std::max(evals.sum(), 0.0);

    PcaResult result;
    result.ids = ids;
    result.axes.resize(n_components, d);
    result.explained_variance_ratio.resize(static_cast<std::size_t>(n_components));
    for (int c = 0; c < n_components; ++c) {
        const Eigen::Index src = evals.size() - 1 - c;
        Eigen::VectorXd axis = evecs.col(src);
        // Deterministic sign: largest-magnitude loading positive.
        Eigen::Index arg_max = 0;
        for (Eigen::Index i = 1; i < axis.size(); ++i) {
            if (std::abs(axis[i]) > std::abs(axis[arg_max])) arg_max = i;
        }
        if (axis[arg_max] < 0.0) axis = -axis;
        result.axes.row(c) = axis.transpose();
        result.explained_variance_ratio[static_cast<std::size_t>(c)] =
            total_var > 0.0 ? std::max(evals[src], 0.0) / total_var : 0.0;
    }
    result.coords = centered * result.axes.transpose();
    return result;
}

std::vector<std::string> balanced_subset(
    const std::vector<std::pair<std::string, std::string>>& id_labels, int total,
    std::uint64_t seed) {
    if (id_labels.empty()) throw DataError("balanced_subset: no instances");
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& [id, label] : id_labels) by_label[label].push_back(id);
    const int k = static_cast<int>(by_label.size());
    if (total % k != 0) {
        throw DataError("balanced_subset: total " + std::to_string(total) +
                        " does not divide across " + std::to_string(k) + " labels");
    }
    const int per_label = total / k;
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(total));
    for (auto& [label, ids] : by_label) {
        if (static_cast<int>(ids.size()) < per_label) {
            throw DataError("balanced_subset: label '" + label + "' has only " +
                            std::to_string(ids.size()) + " instances, need " +
                            std::to_string(per_label));
        }
        std::sort(ids.begin(), ids.end());
        SeededRng rng(SeededRng::derive(seed, "balanced_subset", {fnv1a64(label)}));
        auto chosen = rng.sample_indices(ids.size(), static_cast<std::size_t>(per_label));
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t c : chosen) out.push_back(ids[c]);
    }
    return out;
}

}  // namespace cxnprobe
