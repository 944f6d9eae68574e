#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cxnprobe/embed_cache.hpp"
#include "cxnprobe/probe.hpp"
#include "cxnprobe/split.hpp"
#include "cxnprobe/staticvec.hpp"
#include "cxnprobe/types.hpp"

namespace cxnprobe {

enum class CellMode { Unk, Prep, StaticLemma, StaticForm, Control };

std::string to_string(CellMode m);
CellMode cell_mode_from_string(const std::string& s);

// One accuracy + confusion measurement: a point on one curve.
struct EvalCell {
    std::string config;
    std::string model_id;  // encoder id, or static table source id
    CellMode mode = CellMode::Unk;
    std::optional<int> layer;  // absent for static baselines
    int split_index = 0;
    int train_size = 0;
    double accuracy = 0.0;
    std::vector<std::string> classes;
    std::vector<long long> confusion;  // K x K row-major, [true][predicted]
};

struct ExperimentSpec {
    SplitConfiguration config;
    std::vector<SplitAssignment> splits;
    std::vector<std::string> model_ids;    // contextual encoders (cached)
    std::vector<TargetMode> modes = {TargetMode::Unk, TargetMode::Prep};
    std::vector<const StaticVectorTable*> static_tables;
    bool static_form_baseline = false;     // adds STATIC_FORM cells
    bool control = true;                   // per-layer control classifier
    // Control splits must be lemma-disjoint; when empty they are generated
    // from `config` with group_by_lemma_only set and a derived seed.
    std::vector<SplitAssignment> control_splits;
    std::vector<int> layers;               // empty = all 0..L
    std::vector<int> train_sizes;          // empty = decremental or full
    ProbeHyperparams probe;
    std::uint64_t control_seed = 99;
    int threads = 0;                       // 0 = hardware concurrency
};

// Runs the full grid config x model x mode x layer x split x train size,
// plus control and static cells. All embeddings must already be cached;
// missing entries raise an error listing the ids.
std::vector<EvalCell> run_experiment(const std::vector<ConstructionInstance>& corpus,
                                     const ExperimentSpec& spec,
                                     const EmbeddingCache& cache);

// Mean/stdev accuracy over splits and elementwise-summed confusion per
// (config, model, mode, layer, train_size) condition.
struct SummaryRow {
    std::string config;
    std::string model_id;
    CellMode mode = CellMode::Unk;
    std::optional<int> layer;
    int train_size = 0;
    int n_splits = 0;
    double mean_accuracy = 0.0;
    double stdev_accuracy = 0.0;  // population
    std::vector<std::string> classes;
    std::vector<long long> confusion_sum;
};

std::vector<SummaryRow> aggregate(const std::vector<EvalCell>& cells);

}  // namespace cxnprobe
