#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

struct ProbeHyperparams {
    double l2 = 1.0;        // strength of (l2/2)*||W||^2, bias unregularized
    double tol = 1e-4;      // max-norm gradient stopping criterion
    int max_iter = 1000;
    std::uint64_t seed = 0; // recorded; training itself is deterministic
    bool standardize = true;
};

// Per-dimension affine transform fit on training rows only.
struct FeatureScaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd inv_std;
    bool enabled = false;

    void fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

struct ProbeModel {
    Eigen::MatrixXd weights;  // K x d
    Eigen::VectorXd bias;     // K
    std::vector<std::string> classes;
    ProbeHyperparams hyperparams;
    FeatureScaler scaler;
    int iterations = 0;
    double final_grad_norm = 0.0;

    // argmax with ties broken toward the lowest class index
    std::vector<std::string> predict(const Eigen::MatrixXd& X) const;
};

// Regularized multinomial cross-entropy and its gradient at theta
// (layout: W row-major then b). Exposed so tests can check the analytic
// gradient against central finite differences.
double probe_objective(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       int n_classes, double l2, const Eigen::VectorXd& theta,
                       Eigen::VectorXd* grad);

ProbeModel train_probe(const Eigen::MatrixXd& X,
                       const std::vector<std::string>& labels,
                       const ProbeHyperparams& hp = {});

struct Evaluation {
    double accuracy = 0.0;
    std::vector<std::string> classes;
    std::vector<std::vector<long long>> confusion;  // [true][predicted]
};

Evaluation evaluate(const ProbeModel& model, const Eigen::MatrixXd& X,
                    const std::vector<std::string>& labels);

// Per-lemma random labels for the selectivity control. All instances of a
// lemma share one label; lemma groups are assigned largest-first to the
// label with the biggest remaining deficit, so marginals track the task's
// class balance as closely as the group structure allows.
struct ControlLabelMap {
    std::map<std::string, std::string> lemma_to_label;  // normalized lemma
    std::uint64_t seed = 0;

    const std::string& label_for(const ConstructionInstance& inst) const;
};

ControlLabelMap control_labels(const std::vector<ConstructionInstance>& corpus,
                               const std::vector<std::string>& task_labels,
                               std::uint64_t seed);

}  // namespace cxnprobe
