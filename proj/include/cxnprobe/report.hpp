#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cxnprobe/experiment.hpp"
#include "cxnprobe/pca.hpp"

namespace cxnprobe {

// Which slice of a summary one figure shows: one panel per model, layer
// curves for the contextual modes, static baselines as dashed/dotted
// horizontal reference lines, control curves in grey, decremental train
// sizes shaded progressively lighter.
struct CurveSpec {
    std::string config;
    std::vector<std::string> models;     // panel order; empty = all found
    std::vector<int> train_sizes;        // descending; empty = all found
    std::string title;
};

// Writes <out_base>.svg and <out_base>.png. Errors name the filter when a
// requested series has no data.
void render_layer_curves(const std::vector<SummaryRow>& summary,
                         const CurveSpec& spec,
                         const std::filesystem::path& out_base);

struct ConfusionPanel {
    std::string title;  // e.g. "UNK" / "PREP"
    std::vector<std::string> labels;
    std::vector<long long> matrix;  // K x K row-major, [true][predicted]
};

// Side-by-side panels with raw-count annotations.
void render_confusion(const std::vector<ConfusionPanel>& panels,
                      const std::filesystem::path& out_base);

// Per-layer coordinate table (delimited: id, label, pc1.., evr..) and a
// fixed-view orthographic projection of the 3-D cloud.
void export_pca_coords(const PcaResult& pca,
                       const std::map<std::string, std::string>& labels,
                       const std::filesystem::path& out_path);
void render_pca(const PcaResult& pca,
                const std::map<std::string, std::string>& labels,
                const std::string& title, const std::filesystem::path& out_base);

}  // namespace cxnprobe
