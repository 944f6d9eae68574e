#include "cxnprobe/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cxnprobe/errors.hpp"

namespace cxnprobe {

void PenaltyMap::set(const std::string& a, const std::string& b, double penalty) {
    if (penalty < 0.0 || penalty > 1.0) {
        throw Error("penalty must lie in [0,1]");
    }
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    overrides_[key] = penalty;
}

double PenaltyMap::operator()(const std::string& a, const std::string& b) const {
    if (a == b) return 0.0;
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = overrides_.find(key);
    return it == overrides_.end() ? 1.0 : it->second;
}

double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw Error("cohen_kappa: length mismatch (" + std::to_string(labels_a.size()) +
                    " vs " + std::to_string(labels_b.size()) + ")");
    }
    if (labels_a.empty()) throw Error("cohen_kappa: empty sequences");

    const double n = static_cast<double>(labels_a.size());
    std::map<std::string, double> marg_a, marg_b;
    double observed = 0.0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        marg_a[labels_a[i]] += 1.0;
        marg_b[labels_b[i]] += 1.0;
        if (labels_a[i] == labels_b[i]) observed += 1.0;
    }
    const double p_o = observed / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end()) p_e += (ca / n) * (it->second / n);
    }
    if (p_e >= 1.0) return 1.0;  // both raters constant and identical
    return (p_o - p_e) / (1.0 - p_e);
}

namespace {

// Values grouped per unit (instance), in deterministic order.
struct Coincidence {
    std::vector<std::string> labels;                 // label alphabet
    std::map<std::string, std::size_t> label_index;
    std::vector<std::vector<double>> matrix;         // o_ck
    std::vector<double> totals;                      // n_c
    double n = 0.0;                                  // sum of all n_c
};

Coincidence build_coincidence(const std::vector<AnnotationRecord>& records) {
    std::map<std::string, std::vector<std::string>> units;
    std::set<std::string> annotators;
    std::set<std::string> alphabet;
    for (const auto& rec : records) {
        units[rec.instance_id].push_back(rec.label);
        annotators.insert(rec.annotator_id);
        alphabet.insert(rec.label);
    }
    if (annotators.size() < 2) {
        throw Error("krippendorff_alpha: needs at least 2 annotators");
    }

    Coincidence c;
    c.labels.assign(alphabet.begin(), alphabet.end());
    for (std::size_t i = 0; i < c.labels.size(); ++i) c.label_index[c.labels[i]] = i;
    c.matrix.assign(c.labels.size(), std::vector<double>(c.labels.size(), 0.0));
    c.totals.assign(c.labels.size(), 0.0);

    bool any_pairable = false;
    for (const auto& [unit, values] : units) {
        const std::size_t m = values.size();
        if (m < 2) continue;  // unpairable units contribute nothing
        any_pairable = true;
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                c.matrix[c.label_index.at(values[i])][c.label_index.at(values[j])] += w;
            }
        }
    }
    if (!any_pairable) {
        throw Error("krippendorff_alpha: no instance has 2+ annotations");
    }
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        for (std::size_t j = 0; j < c.labels.size(); ++j) {
            c.totals[i] += c.matrix[i][j];
        }
        c.n += c.totals[i];
    }
    return c;
}

double alpha_from_coincidence(const Coincidence& c, const PenaltyMap& penalty) {
    double d_observed = 0.0;
    double d_expected = 0.0;
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        for (std::size_t j = 0; j < c.labels.size(); ++j) {
            const double delta = penalty(c.labels[i], c.labels[j]);
            d_observed += c.matrix[i][j] * delta;
            d_expected += c.totals[i] * c.totals[j] * delta;
        }
    }
    d_observed /= c.n;
    d_expected /= c.n * (c.n - 1.0);
    if (d_expected == 0.0) return 1.0;  // all values identical
    return 1.0 - d_observed / d_expected;
}

}  // namespace

double krippendorff_alpha(const std::vector<AnnotationRecord>& records) {
    return krippendorff_alpha(records, PenaltyMap());
}

double krippendorff_alpha(const std::vector<AnnotationRecord>& records,
                          const PenaltyMap& penalty) {
    return alpha_from_coincidence(build_coincidence(records), penalty);
}

std::vector<AnnotatorPairKappa> pairwise_kappas(
    const std::vector<AnnotationRecord>& records) {
    std::map<std::string, std::map<std::string, std::string>> by_annotator;
    for (const auto& rec : records) {
        by_annotator[rec.annotator_id][rec.instance_id] = rec.label;
    }
    std::vector<std::string> annotators;
    for (const auto& [a, _] : by_annotator) annotators.push_back(a);

    std::vector<AnnotatorPairKappa> out;
    for (std::size_t i = 0; i < annotators.size(); ++i) {
        for (std::size_t j = i + 1; j < annotators.size(); ++j) {
            const auto& mi = by_annotator[annotators[i]];
            const auto& mj = by_annotator[annotators[j]];
            std::vector<std::string> la, lb;
            for (const auto& [inst, label] : mi) {
                auto it = mj.find(inst);
                if (it != mj.end()) {
                    la.push_back(label);
                    lb.push_back(it->second);
                }
            }
            if (la.empty()) continue;
            out.push_back({annotators[i], annotators[j], cohen_kappa(la, lb), la.size()});
        }
    }
    return out;
}

std::optional<double> calibrate_pair_penalty(
    const std::vector<AnnotationRecord>& records, const std::string& label_a,
    const std::string& label_b, double target_alpha, double tol) {
    Coincidence c = build_coincidence(records);
    auto alpha_at = [&](double p) {
        PenaltyMap penalty;
        penalty.set(label_a, label_b, p);
        return alpha_from_coincidence(c, penalty);
    };
    // alpha is monotone non-increasing in the penalty.
    double lo = 0.0, hi = 1.0;
    double alpha_lo = alpha_at(lo), alpha_hi = alpha_at(hi);
    if (target_alpha > alpha_lo + tol || target_alpha < alpha_hi - tol) {
        return std::nullopt;
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        double a = alpha_at(mid);
        if (std::abs(a - target_alpha) <= tol) return mid;
        if (a > target_alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace cxnprobe
