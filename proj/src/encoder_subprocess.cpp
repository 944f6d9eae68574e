#include "cxnprobe/encoder_subprocess.hpp"

#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "cxnprobe/encoder_synthetic.hpp"
#include "cxnprobe/errors.hpp"

namespace cxnprobe {

namespace {

std::string default_helper() {
    // tools/hf_encoder.py relative to the working directory, else PATH.
    const std::filesystem::path local = "tools/hf_encoder.py";
    if (std::filesystem::exists(local)) return local.string();
    return "hf_encoder.py";
}

}  // namespace

SubprocessEncoder::SubprocessEncoder(const std::string& model_id,
                                     const std::string& helper_path)
    : model_id_(model_id) {
    const std::string prefix = "hf:";
    if (model_id.rfind(prefix, 0) != 0) {
        throw SchemaError("not an hf model id: " + model_id);
    }
    resource_ = model_id.substr(prefix.size());
    const std::string helper = helper_path.empty() ? default_helper() : helper_path;
    child_.start({"python3", helper, "--model", resource_});
    handshake();
}

SubprocessEncoder::~SubprocessEncoder() {
    if (child_.running()) {
        try {
            child_.write_line(R"({"op":"quit"})");
        } catch (...) {
        }
        child_.close();
    }
}

void SubprocessEncoder::handshake() {
    nlohmann::json ready;
    try {
        ready = nlohmann::json::parse(child_.read_line());
    } catch (const std::exception& e) {
        throw ResourceError(std::string("encoder helper failed to start: ") + e.what());
    }
    if (ready.value("event", "") == "error") {
        throw ResourceError("encoder helper error: " + ready.value("message", "unknown"));
    }
    if (ready.value("event", "") != "ready") {
        throw ResourceError("encoder helper sent an unexpected handshake");
    }
    layers_ = ready.at("layers").get<int>();
    hidden_ = ready.at("hidden").get<int>();
    unk_symbol_ = ready.at("unk_token").get<std::string>();
    unk_id_ = ready.at("unk_id").get<long>();
    unk_policy_ = ready.value("unk_policy", "unk");
    max_seq_ = ready.value("max_len", static_cast<std::size_t>(0));
    tokenizer_version_ = ready.value("tokenizer_version", resource_);
    if (layers_ < 1 || hidden_ < 1) {
        throw ResourceError("encoder helper reported an invalid model shape");
    }
    if (unk_symbol_.empty()) {
        throw CapabilityError("model '" + resource_ +
                              "' has neither an unknown nor a mask token");
    }
}

Tokenization SubprocessEncoder::tokenize(const std::string& sentence) {
    nlohmann::json req{{"op", "tokenize"}, {"sentence", sentence}};
    child_.write_line(req.dump());
    nlohmann::json resp = nlohmann::json::parse(child_.read_line());
    if (resp.value("event", "") == "error") {
        throw ResourceError("helper tokenize error: " + resp.value("message", ""));
    }
    Tokenization tok;
    for (const auto& piece : resp.at("pieces")) {
        Subtoken st;
        st.piece = piece.at("piece").get<std::string>();
        st.cp_start = piece.at("start").get<std::size_t>();
        st.cp_end = piece.at("end").get<std::size_t>();
        st.vocab_id = piece.at("id").get<long>();
        st.is_marker = piece.value("marker", false);
        tok.subtokens.push_back(std::move(st));
    }
    return tok;
}

std::vector<float> SubprocessEncoder::hidden_states(const std::vector<Subtoken>& seq,
                                                    const ExtractionContext&) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& st : seq) ids.push_back(st.vocab_id);
    nlohmann::json req{{"op", "states"}, {"ids", ids}};
    child_.write_line(req.dump());
    nlohmann::json header = nlohmann::json::parse(child_.read_line());
    if (header.value("event", "") == "error") {
        throw ResourceError("helper states error: " + header.value("message", ""));
    }
    const std::size_t layers = header.at("layers").get<std::size_t>();
    const std::size_t t = header.at("seq").get<std::size_t>();
    const std::size_t h = header.at("hidden").get<std::size_t>();
    if (layers != static_cast<std::size_t>(layers_) + 1 || t != seq.size() ||
        h != static_cast<std::size_t>(hidden_)) {
        throw ResourceError("helper returned a tensor of unexpected shape");
    }
    const std::size_t n = layers * t * h;
    std::vector<char> raw = child_.read_exact(n * sizeof(float));
    std::vector<float> out(n);
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

std::unique_ptr<Encoder> make_encoder(const std::string& model_id,
                                      const std::string& helper_path) {
    if (model_id.rfind("synthetic:", 0) == 0) {
        return std::make_unique<SyntheticEncoder>(SyntheticEncoderParams::parse(model_id));
    }
    if (model_id.rfind("hf:", 0) == 0) {
        return std::make_unique<SubprocessEncoder>(model_id, helper_path);
    }
    throw SchemaError("unknown encoder scheme in model id '" + model_id +
                      "' (expected synthetic: or hf:)");
}

}  // namespace cxnprobe
