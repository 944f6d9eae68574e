#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

enum class CorpusFormat { DelimitedTable, RecordLines };

struct RowRejection {
    std::size_t row = 0;  // 1-based data row (or record line)
    std::string id;       // if parseable
    std::string reason;
};

struct LoadResult {
    std::vector<ConstructionInstance> instances;
    std::vector<RowRejection> rejected;
};

// Optional inflected-form -> grammatical-number table. When a form is absent
// the number check is reported as unverifiable rather than violated.
class MorphLookup {
public:
    MorphLookup() = default;
    static MorphLookup from_file(const std::filesystem::path& path);

    void add(const std::string& form, Number n);
    std::optional<Number> number_of(const std::string& form) const;
    bool empty() const { return form_number_.empty(); }

private:
    std::map<std::string, Number> form_number_;
};

struct ValidationIssue {
    std::string code;    // e.g. "noun_identity", "span_out_of_range"
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    std::vector<std::string> unverifiable;  // checks that could not run
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const ConstructionInstance& inst,
                                   const MorphLookup* morph = nullptr);

// Loads and structurally validates a corpus file. Rows that fail parsing or
// any TYPE invariant land in the rejection report; returned instances all
// pass. Duplicate ids abort with an integrity error, a missing column with a
// schema error.
LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const MorphLookup* morph = nullptr);

void write_corpus(const std::filesystem::path& path,
                  const std::vector<ConstructionInstance>& instances,
                  CorpusFormat format);

void write_rejection_report(const std::filesystem::path& path,
                            const std::vector<RowRejection>& rejected);

// Length and per-(lemma, prep) cap filter. Retains sentences with strictly
// more than min_tokens-1 whitespace tokens; over-cap buckets are reduced to
// max_per_lemma_prep by a seeded draw. Surviving instances keep their
// original relative order.
std::vector<ConstructionInstance> filter_corpus(
    const std::vector<ConstructionInstance>& instances, int min_tokens = 6,
    int max_per_lemma_prep = 30, std::uint64_t seed = 0x5eed);

// Annotation files: columns id, annotator_id, label.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);
void write_annotations(const std::filesystem::path& path,
                       const std::vector<AnnotationRecord>& records);

}  // namespace cxnprobe
