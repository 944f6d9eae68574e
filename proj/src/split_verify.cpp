#include "cxnprobe/split_verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cxnprobe/text.hpp"

namespace cxnprobe {

namespace {

// Label derivation restated here on purpose; the verifier must not lean on
// the solver's code paths.
std::string verifier_label(const ConstructionInstance& inst, LabelKind kind) {
    if (inst.cls == InstanceClass::Distractor) return "DISTRACTOR";
    if (kind == LabelKind::InstanceClassLabel) return "CXN";
    return to_string(inst.semantic_label);
}

}  // namespace

ConstraintReport verify_split(const std::vector<ConstructionInstance>& corpus,
                              const SplitAssignment& assignment,
                              const SplitConfiguration& config) {
    ConstraintReport report;
    auto violate = [&](std::string code, std::string detail) {
        report.violations.push_back({std::move(code), std::move(detail)});
    };

    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;

    // Partition membership and id sanity.
    std::set<std::string> train_set(assignment.train_ids.begin(), assignment.train_ids.end());
    std::set<std::string> test_set(assignment.test_ids.begin(), assignment.test_ids.end());
    if (train_set.size() != assignment.train_ids.size()) {
        violate("duplicate_id", "train partition lists an id twice");
    }
    if (test_set.size() != assignment.test_ids.size()) {
        violate("duplicate_id", "test partition lists an id twice");
    }
    for (const auto& id : train_set) {
        if (test_set.count(id)) violate("duplicate_id", "id in both partitions: " + id);
        if (!by_id.count(id)) violate("unknown_id", "train id not in corpus: " + id);
    }
    for (const auto& id : test_set) {
        if (!by_id.count(id)) violate("unknown_id", "test id not in corpus: " + id);
    }

    std::vector<const ConstructionInstance*> train, test;
    for (const auto& id : assignment.train_ids) {
        auto it = by_id.find(id);
        if (it != by_id.end()) train.push_back(it->second);
    }
    for (const auto& id : assignment.test_ids) {
        auto it = by_id.find(id);
        if (it != by_id.end()) test.push_back(it->second);
    }

    // Lemma-label disjointness via the full cross product.
    std::set<std::pair<std::string, std::string>> reported;
    for (const auto* a : train) {
        for (const auto* b : test) {
            const std::string la = text::normalize_lemma(a->noun_lemma);
            const std::string lb = text::normalize_lemma(b->noun_lemma);
            if (la != lb) continue;
            if (config.group_by_lemma_only) {
                if (reported.insert({la, "*"}).second) {
                    violate("lemma_overlap", "lemma shared across partitions: " + la);
                }
                continue;
            }
            const std::string label_a = verifier_label(*a, config.label_kind);
            const std::string label_b = verifier_label(*b, config.label_kind);
            if (label_a == label_b && reported.insert({la, label_a}).second) {
                violate("lemma_label_overlap",
                        "(" + la + ", " + label_a + ") appears in train and test");
            }
        }
    }

    // Quota cells, counted straight off the instances.
    std::map<std::string, int> counts;
    auto count_side = [&](const std::vector<const ConstructionInstance*>& side,
                          const char* partition) {
        for (const auto* inst : side) {
            counts[std::string(partition) + "/" + verifier_label(*inst, config.label_kind) +
                   "/" + inst->prep] += 1;
        }
    };
    count_side(train, "train");
    count_side(test, "test");

    std::set<std::string> quota_cells;
    for (const auto& [key, quota] : config.quotas) {
        const std::string cell = to_string(key);
        quota_cells.insert(cell);
        const int have = counts.count(cell) ? counts.at(cell) : 0;
        if (have != quota) {
            violate("quota_mismatch", cell + ": expected " + std::to_string(quota) +
                                          ", found " + std::to_string(have));
        }
    }
    for (const auto& [cell, n] : counts) {
        if (!quota_cells.count(cell)) {
            violate("unquoted_instances",
                    cell + ": " + std::to_string(n) + " instance(s) outside the quota table");
        }
    }

    // Distractor-type restrictions.
    auto check_types = [&](const std::vector<const ConstructionInstance*>& side, Partition p) {
        auto it = config.allowed_distractor_types.find(p);
        if (it == config.allowed_distractor_types.end() || it->second.empty()) return;
        for (const auto* inst : side) {
            if (inst->cls == InstanceClass::Distractor &&
                !it->second.count(inst->distractor_type)) {
                violate("distractor_type_banned",
                        to_string(p) + " contains " + inst->id + " of type " +
                            to_string(inst->distractor_type));
            }
        }
    };
    check_types(train, Partition::Train);
    check_types(test, Partition::Test);

    // Generalization: the test side must absorb every eligible instance of
    // the exhaustive preps.
    if (!config.test_exhaustive_preps.empty()) {
        for (const auto& inst : corpus) {
            const bool exhaustive =
                std::find(config.test_exhaustive_preps.begin(),
                          config.test_exhaustive_preps.end(),
                          inst.prep) != config.test_exhaustive_preps.end();
            if (!exhaustive) continue;
            const std::string cell =
                "test/" + verifier_label(inst, config.label_kind) + "/" + inst.prep;
            if (!quota_cells.count(cell)) continue;
            if (train_set.count(inst.id)) {
                violate("forced_test_in_train", inst.id + " has an exhaustive test prep");
            } else if (!test_set.count(inst.id)) {
                violate("forced_test_missing",
                        inst.id + " (prep '" + inst.prep + "') must be in the test set");
            }
        }
    }

    return report;
}

}  // namespace cxnprobe
