#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cxnprobe/types.hpp"

namespace cxnprobe {

enum class TargetMode { Prep, Unk };

std::string to_string(TargetMode m);
TargetMode target_mode_from_string(const std::string& s);

struct Subtoken {
    std::string piece;
    std::size_t cp_start = 0;  // codepoint offsets into the sentence
    std::size_t cp_end = 0;
    long vocab_id = 0;
    bool is_marker = false;  // [CLS], [SEP], <s>, ... stripped for alignment
};

struct Tokenization {
    std::vector<Subtoken> subtokens;
};

struct SubtokenRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // [begin, end)

    std::size_t size() const { return end - begin; }
};

// The probed token: the preposition itself or its unknown-token substitute,
// located by codepoint span inside the instance's construction span.
struct TargetSpec {
    TargetMode mode = TargetMode::Prep;
    std::size_t cp_start = 0;
    std::size_t cp_end = 0;
};

// Locates the preposition token inside the construction span. Tolerates the
// Italian euphonic alternation (a -> ad, e -> ed) so spans like
// "da agenzia ad agenzia" resolve for prep "a".
TargetSpec make_target(const ConstructionInstance& inst, TargetMode mode);

struct ExtractionContext {
    const ConstructionInstance* instance = nullptr;
    TargetMode mode = TargetMode::Prep;
    SubtokenRange target;
};

// Inference-only handle on a masked-language encoder. Layer 0 of every state
// tensor is the input-embedding layer; rows 1..L are the transformer layers.
class Encoder {
public:
    virtual ~Encoder() = default;

    virtual std::string model_id() const = 0;
    virtual int n_layers() const = 0;    // L (excluding the embedding row)
    virtual int hidden_size() const = 0;
    virtual std::string unk_symbol() const = 0;
    virtual long unk_vocab_id() const = 0;
    // "unk" when the tokenizer has a designated unknown token, "mask" when
    // the mask symbol stands in for it; recorded in result metadata.
    virtual std::string unk_policy() const { return "unk"; }
    virtual std::size_t max_sequence() const = 0;  // 0 = unbounded
    virtual std::string tokenizer_version() const = 0;

    virtual Tokenization tokenize(const std::string& sentence) = 0;
    // Flat layer-major tensor: (n_layers()+1) x seq.size() x hidden_size().
    virtual std::vector<float> hidden_states(const std::vector<Subtoken>& seq,
                                             const ExtractionContext& ctx) = 0;
};

// Maps a codepoint span to the contiguous subtoken range covering it.
// Marker subtokens are ignored for the overlap test. Throws DataError when
// no subtoken overlaps or the overlapping subtokens are not contiguous.
SubtokenRange align_target(const std::string& sentence, std::size_t cp_start,
                           std::size_t cp_end, const Tokenization& tok);

struct Substitution {
    std::vector<Subtoken> sequence;
    SubtokenRange target;  // length 1 by construction
};

// Replaces the aligned subtoken run with exactly one unknown-token subtoken.
Substitution substitute_unknown(const Tokenization& tok, SubtokenRange aligned,
                                const Encoder& encoder);

// Arithmetic mean over k rows of width H; k = 0 is an error.
std::vector<float> pool_subwords(const std::vector<std::vector<float>>& rows);
std::vector<float> pool_subwords(const float* rows, std::size_t k, std::size_t h);

struct LayerEmbeddingSet {
    std::string instance_id;
    TargetMode mode = TargetMode::Prep;
    int layers = 0;  // L; the matrix has L+1 rows
    int hidden = 0;
    std::vector<float> matrix;  // (L+1) x H row-major
    std::string model_id;
    std::uint64_t fingerprint = 0;

    const float* row(int layer) const {
        return matrix.data() + static_cast<std::size_t>(layer) *
                                   static_cast<std::size_t>(hidden);
    }
};

std::uint64_t extraction_fingerprint(const std::string& model_id,
                                     const std::string& tokenizer_version,
                                     TargetMode mode, const std::string& sentence);

// Full extraction path: tokenize, align, substitute for UNK mode, truncate
// around the construction span when over-length, pool the target subtokens
// per layer.
LayerEmbeddingSet extract_embeddings(Encoder& encoder,
                                     const ConstructionInstance& inst,
                                     const TargetSpec& target);

// Parses a model identifier string into an encoder. Supported schemes:
//   synthetic:<name>?layers=..&hidden=..&seed=..&signal=..&noise=..&lemma=..
//                    &siglayer=..&maxseq=..&subword=..
//   hf:<huggingface model id>   (external helper process)
std::unique_ptr<Encoder> make_encoder(const std::string& model_id,
                                      const std::string& helper_path = "");

}  // namespace cxnprobe
