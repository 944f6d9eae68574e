#pragma once

#include <cstdint>
#include <string>

#include "cxnprobe/encoder.hpp"

namespace cxnprobe {

// Deterministic stand-in encoder for tests, fixtures and pipeline smoke
// runs. Layer 0 is a pure (piece, position) function like a real input
// embedding; layers >= signal_from_layer add label-conditioned class means
// (keyed by the instance's class and semantic label), a lemma-keyed
// component at the target positions, and id-keyed noise. Everything is a
// function of the seed, so extraction is bit-reproducible.
struct SyntheticEncoderParams {
    std::string name = "demo";
    int layers = 12;
    int hidden = 64;
    std::uint64_t seed = 7;
    double label_signal = 4.0;
    double lemma_signal = 1.0;
    double noise = 1.0;
    int signal_from_layer = 1;
    std::size_t max_seq = 128;
    int subword_max_cp = 6;  // words longer than this split into subpieces
    // Model identity stays the configuration string as given; the cache is
    // keyed on it verbatim.
    std::string raw_id;

    std::string canonical_id() const;
    static SyntheticEncoderParams parse(const std::string& model_id);
};

class SyntheticEncoder : public Encoder {
public:
    explicit SyntheticEncoder(SyntheticEncoderParams params);

    std::string model_id() const override;
    int n_layers() const override { return params_.layers; }
    int hidden_size() const override { return params_.hidden; }
    std::string unk_symbol() const override { return "[UNK]"; }
    long unk_vocab_id() const override { return 1; }
    std::size_t max_sequence() const override { return params_.max_seq; }
    std::string tokenizer_version() const override;

    Tokenization tokenize(const std::string& sentence) override;
    std::vector<float> hidden_states(const std::vector<Subtoken>& seq,
                                     const ExtractionContext& ctx) override;

private:
    SyntheticEncoderParams params_;
};

}  // namespace cxnprobe
