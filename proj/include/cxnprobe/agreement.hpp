#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

// Symmetric label-pair penalty in [0,1]; 0 = no disagreement, 1 = full.
// Nominal distance is the default (1 for any differing pair).
class PenaltyMap {
public:
    PenaltyMap() = default;

    void set(const std::string& a, const std::string& b, double penalty);
    double operator()(const std::string& a, const std::string& b) const;

private:
    std::map<std::pair<std::string, std::string>, double> overrides_;
};

// Cohen's kappa over two equal-length label sequences. Convention: if both
// raters are constant and identical (chance agreement 1), kappa = 1.
double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b);

// Krippendorff's alpha via the coincidence matrix; nominal distance by
// default, or an explicit penalty map. Requires at least one instance with
// two or more annotations.
double krippendorff_alpha(const std::vector<AnnotationRecord>& records);
double krippendorff_alpha(const std::vector<AnnotationRecord>& records,
                          const PenaltyMap& penalty);

// All pairwise kappas over instances both annotators labelled.
struct AnnotatorPairKappa {
    std::string annotator_a;
    std::string annotator_b;
    double kappa = 0.0;
    std::size_t shared = 0;
};
std::vector<AnnotatorPairKappa> pairwise_kappas(
    const std::vector<AnnotationRecord>& records);

// Finds the penalty p for the (label_a, label_b) pair such that weighted
// alpha equals target, by bisection on [0,1]. Returns nullopt when the
// target is outside the attainable range.
std::optional<double> calibrate_pair_penalty(
    const std::vector<AnnotationRecord>& records, const std::string& label_a,
    const std::string& label_b, double target_alpha, double tol = 1e-6);

}  // namespace cxnprobe
