#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

enum class Partition { Train, Test };

std::string to_string(Partition p);
Partition partition_from_string(const std::string& s);

// Which label the quota cells and the lemma-label disjointness constraint
// use: the CXN/DISTRACTOR class for identification, the semantic label
// (with distractors collapsing to DISTRACTOR) for disambiguation and
// generalization.
enum class LabelKind { InstanceClassLabel, SemanticKind };

std::string split_label_of(const ConstructionInstance& inst, LabelKind kind);

struct QuotaKey {
    Partition partition;
    std::string label;
    std::string prep;

    auto operator<=>(const QuotaKey&) const = default;
};

std::string to_string(const QuotaKey& key);  // "train/CXN/a"

using QuotaTable = std::map<QuotaKey, int>;

struct SplitConfiguration {
    std::string name = "custom";
    LabelKind label_kind = LabelKind::InstanceClassLabel;
    QuotaTable quotas;
    // Distractor types admissible per partition; an absent partition means
    // all types. Non-distractor instances are unaffected.
    std::map<Partition, std::set<DistractorType>> allowed_distractor_types;
    int n_splits = 5;
    std::uint64_t seed = 13;
    double train_ratio = 0.8;
    std::vector<int> decremental_sizes;
    std::optional<int> declared_train_total;
    std::optional<int> declared_test_total;
    // Control-classifier splits: group by lemma alone, so that no lemma is
    // shared across partitions at all (a per-lemma random label would
    // otherwise leak through cross-label lexical overlap).
    bool group_by_lemma_only = false;
    // Generalization: the test partition must absorb every corpus instance
    // whose prep is listed here (and whose label has a test quota cell).
    std::vector<std::string> test_exhaustive_preps;

    int partition_total(Partition p) const;
};

struct SplitAssignment {
    int split_index = 0;
    std::vector<std::string> train_ids;  // sorted
    std::vector<std::string> test_ids;   // sorted
    QuotaTable realized_quotas;
};

// Seeded constraint solver: randomized greedy over lemma-label groups with
// depth-first backtracking and restarts. Deterministic given (corpus, seed);
// throws InfeasibleError naming the first unfillable cell.
std::vector<SplitAssignment> generate_splits(
    const std::vector<ConstructionInstance>& corpus,
    const SplitConfiguration& config);

// Nested decremental training subsets, per-cell balanced exactly.
// sizes[0] must equal the configured train total and every scaled cell count
// must be integral.
std::vector<std::vector<std::string>> decremental_subsets(
    const std::vector<ConstructionInstance>& corpus,
    const SplitConfiguration& config, const SplitAssignment& assignment,
    const std::vector<int>& sizes);

// Train on a/su (disambiguation labels plus distractors), test on every
// per/dopo instance. Convenience wrapper over generate_splits with the
// shipped generalization quota table.
SplitAssignment generalization_split(
    const std::vector<ConstructionInstance>& corpus,
    const std::vector<std::string>& train_preps = {"a", "su"},
    const std::vector<std::string>& test_preps = {"per", "dopo"},
    std::uint64_t seed = 13, int split_index = 0);

// The five shipped configurations (quota tables from the experiment design).
SplitConfiguration simple_config();
SplitConfiguration pseudo_config();
SplitConfiguration other_config();
SplitConfiguration disambig_config();
SplitConfiguration generalize_per_dopo_config();

const std::vector<std::string>& builtin_config_names();
SplitConfiguration config_by_name(const std::string& name);

SplitConfiguration config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SplitConfiguration& config);

// Assignments serialize as record-lines of (split_index, partition, id).
void write_assignments(const std::filesystem::path& path,
                       const std::vector<SplitAssignment>& assignments);
std::vector<SplitAssignment> read_assignments(const std::filesystem::path& path);

}  // namespace cxnprobe
