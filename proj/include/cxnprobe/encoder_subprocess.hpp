#pragma once

#include <memory>
#include <string>

#include "cxnprobe/encoder.hpp"
#include "cxnprobe/subprocess.hpp"

namespace cxnprobe {

// Encoder backed by an external helper process speaking the line-delimited
// JSON protocol documented in docs/formats.md (tokenize requests come back
// as JSON, hidden-state tensors as a JSON header followed by raw f32le
// bytes). tools/hf_encoder.py implements the protocol over HF transformers.
class SubprocessEncoder : public Encoder {
public:
    // model_id: "hf:<repo id>"; helper: path to the helper script (defaults
    // to tools/hf_encoder.py next to the running binary or on PATH).
    SubprocessEncoder(const std::string& model_id, const std::string& helper_path);
    ~SubprocessEncoder() override;

    std::string model_id() const override { return model_id_; }
    int n_layers() const override { return layers_; }
    int hidden_size() const override { return hidden_; }
    std::string unk_symbol() const override { return unk_symbol_; }
    long unk_vocab_id() const override { return unk_id_; }
    std::string unk_policy() const override { return unk_policy_; }
    std::size_t max_sequence() const override { return max_seq_; }
    std::string tokenizer_version() const override { return tokenizer_version_; }

    Tokenization tokenize(const std::string& sentence) override;
    std::vector<float> hidden_states(const std::vector<Subtoken>& seq,
                                     const ExtractionContext& ctx) override;

private:
    void handshake();

    std::string model_id_;
    std::string resource_;  // model id without the scheme prefix
    Subprocess child_;
    int layers_ = 0;
    int hidden_ = 0;
    std::string unk_symbol_;
    long unk_id_ = 0;
    std::string unk_policy_ = "unk";
    std::size_t max_seq_ = 0;
    std::string tokenizer_version_;
};

}  // namespace cxnprobe
