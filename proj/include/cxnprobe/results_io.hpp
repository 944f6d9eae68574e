#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cxnprobe/experiment.hpp"

namespace cxnprobe {

// Record-lines (one JSON object per line) and delimited-table exports.
// Field order is fixed; doubles round-trip exactly.
void write_cells_jsonl(const std::filesystem::path& path,
                       const std::vector<EvalCell>& cells);
std::vector<EvalCell> read_cells_jsonl(const std::filesystem::path& path);

void write_summary_jsonl(const std::filesystem::path& path,
                         const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_jsonl(const std::filesystem::path& path);

void write_summary_table(const std::filesystem::path& path,
                         const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_table(const std::filesystem::path& path);

}  // namespace cxnprobe
