#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxnprobe/corpus.hpp"
#include "cxnprobe/encoder.hpp"
#include "cxnprobe/probe.hpp"
#include "cxnprobe/split.hpp"

namespace cxnprobe {

struct StaticTableConfig {
    std::string id;
    std::filesystem::path path;
    std::string format = "text";  // "text" | "fasttext-bin"
    std::string oov_policy = "subword-compose";
};

struct PcaConfig {
    bool enabled = false;
    int subset = 360;
    std::uint64_t seed = 17;
    int layer_step = 1;
    std::string model;           // empty = first experiment model
    std::string mode = "UNK";
};

// One declarative document drives the whole pipeline; subcommands add no
// positional arguments beyond the config path.
struct ExperimentConfig {
    std::filesystem::path corpus;
    CorpusFormat corpus_format = CorpusFormat::DelimitedTable;
    std::optional<std::filesystem::path> annotations;
    std::optional<std::filesystem::path> morph_lookup;
    std::vector<std::string> configurations;  // builtin names or JSON paths
    std::vector<std::string> models;
    std::string helper;  // hf helper script override
    std::vector<TargetMode> modes = {TargetMode::Unk, TargetMode::Prep};
    std::vector<StaticTableConfig> static_tables;
    bool control = true;
    std::uint64_t filter_seed = 7;
    std::uint64_t split_seed = 13;
    std::uint64_t control_seed = 99;
    int min_tokens = 6;
    int max_per_lemma_prep = 30;
    bool decremental = true;
    std::vector<int> layers;
    ProbeHyperparams probe;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";
    PcaConfig pca;
    bool replication = false;
    std::optional<std::filesystem::path> english_source;
    int threads = 0;

    nlohmann::json raw;  // as loaded, for the manifest

    std::filesystem::path splits_dir() const { return output_dir / "splits"; }
    std::filesystem::path results_dir() const { return output_dir / "results"; }
    std::filesystem::path figures_dir() const { return output_dir / "figures"; }
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Converts the earlier English study's CSV layout (sentence, target, cls,
// semantic_label, lemma, form, number, prep) into the native schema with
// language "en". Returns the written corpus path.
std::filesystem::path convert_english_source(const ExperimentConfig& config);

// Stage entry points; they throw on failure (the CLI maps exceptions to
// exit codes) except where a nonzero data-violation exit is part of the
// contract.
int cmd_validate(const ExperimentConfig& config);
int cmd_split(const ExperimentConfig& config, bool force);
int cmd_extract(const ExperimentConfig& config);
int cmd_probe(const ExperimentConfig& config);
int cmd_report(const ExperimentConfig& config);
int cmd_run_all(const ExperimentConfig& config, bool force);

}  // namespace cxnprobe
