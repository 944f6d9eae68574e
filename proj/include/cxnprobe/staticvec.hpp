#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

enum class OovPolicy { SubwordCompose, ZeroVector, Error };

OovPolicy oov_policy_from_string(const std::string& s);
std::string to_string(OovPolicy policy);

// Context-independent word vectors for the static baselines. Two sources:
// plain text ("word v1 v2 ..." per line, optional "count dim" header) and
// the non-quantized fastText binary format, which also enables exact
// subword composition for out-of-vocabulary words.
class StaticVectorTable {
public:
    static StaticVectorTable load_text(const std::filesystem::path& path,
                                       OovPolicy policy, std::string source_id);
    static StaticVectorTable load_fasttext_bin(const std::filesystem::path& path,
                                               OovPolicy policy, std::string source_id);

    int dim() const { return dim_; }
    const std::string& source_id() const { return source_id_; }
    OovPolicy oov_policy() const { return policy_; }
    bool supports_subwords() const { return bucket_ > 0; }

    bool has_exact(const std::string& word) const;
    // Applies the OOV policy for unknown words.
    std::vector<float> lookup(const std::string& word) const;

    // fastText-exact composition over char n-grams (test oracle hook);
    // requires a subword-capable table.
    std::vector<float> compose_subwords(const std::string& word) const;

private:
    std::vector<float> row(std::size_t index) const;

    int dim_ = 0;
    OovPolicy policy_ = OovPolicy::ZeroVector;
    std::string source_id_;
    std::map<std::string, std::size_t> vocab_;  // word -> matrix row
    std::vector<float> matrix_;                 // (nwords + bucket) x dim
    std::size_t nwords_ = 0;
    std::int64_t bucket_ = 0;
    int minn_ = 0;
    int maxn_ = 0;
};

std::vector<float> lemma_features(const ConstructionInstance& inst,
                                  const StaticVectorTable& table);
std::vector<float> form_features(const ConstructionInstance& inst,
                                 const StaticVectorTable& table);

}  // namespace cxnprobe
