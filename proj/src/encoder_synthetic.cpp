#include "cxnprobe/encoder_synthetic.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe {

namespace {

std::map<std::string, std::string> parse_query(const std::string& query) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < query.size()) {
        std::size_t amp = query.find('&', pos);
        if (amp == std::string::npos) amp = query.size();
        const std::string item = query.substr(pos, amp - pos);
        const std::size_t eq = item.find('=');
        if (eq != std::string::npos) {
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
        pos = amp + 1;
    }
    return kv;
}

// A reproducible pseudo-Gaussian vector keyed by an arbitrary string.
void add_keyed_gaussian(std::vector<float>& row, std::uint64_t key, double scale) {
    if (scale == 0.0) return;
    SeededRng rng(key);
    for (auto& v : row) {
        v += static_cast<float>(scale * rng.gaussian());
    }
}

}  // namespace

std::string SyntheticEncoderParams::canonical_id() const {
    std::ostringstream os;
    os << "synthetic:" << name << "?layers=" << layers << "&hidden=" << hidden
       << "&seed=" << seed << "&signal=" << label_signal << "&lemma=" << lemma_signal
       << "&noise=" << noise << "&siglayer=" << signal_from_layer
       << "&maxseq=" << max_seq << "&subword=" << subword_max_cp;
    return os.str();
}

SyntheticEncoderParams SyntheticEncoderParams::parse(const std::string& model_id) {
    const std::string prefix = "synthetic:";
    if (model_id.rfind(prefix, 0) != 0) {
        throw SchemaError("not a synthetic model id: " + model_id);
    }
    SyntheticEncoderParams p;
    p.raw_id = model_id;
    std::string rest = model_id.substr(prefix.size());
    const std::size_t q = rest.find('?');
    p.name = rest.substr(0, q);
    if (p.name.empty()) throw SchemaError("synthetic model id needs a name");
    if (q != std::string::npos) {
        for (const auto& [key, value] : parse_query(rest.substr(q + 1))) {
            try {
                if (key == "layers") p.layers = std::stoi(value);
                else if (key == "hidden") p.hidden = std::stoi(value);
                else if (key == "seed") p.seed = std::stoull(value);
                else if (key == "signal") p.label_signal = std::stod(value);
                else if (key == "lemma") p.lemma_signal = std::stod(value);
                else if (key == "noise") p.noise = std::stod(value);
                else if (key == "siglayer") p.signal_from_layer = std::stoi(value);
                else if (key == "maxseq") p.max_seq = static_cast<std::size_t>(std::stoull(value));
                else if (key == "subword") p.subword_max_cp = std::stoi(value);
                else throw SchemaError("unknown synthetic encoder parameter '" + key + "'");
            } catch (const std::invalid_argument&) {
                throw SchemaError("bad value for synthetic parameter '" + key + "'");
            }
        }
    }
    if (p.layers < 1 || p.hidden < 1) {
        throw SchemaError("synthetic encoder needs layers >= 1 and hidden >= 1");
    }
    return p;
}

SyntheticEncoder::SyntheticEncoder(SyntheticEncoderParams params)
    : params_(std::move(params)) {}

std::string SyntheticEncoder::model_id() const {
    return params_.raw_id.empty() ? params_.canonical_id() : params_.raw_id;
}

std::string SyntheticEncoder::tokenizer_version() const {
    return "synthetic-tokenizer-1/subword=" + std::to_string(params_.subword_max_cp);
}

Tokenization SyntheticEncoder::tokenize(const std::string& sentence) {
    Tokenization tok;
    Subtoken cls;
    cls.piece = "[CLS]";
    cls.is_marker = true;
    cls.vocab_id = 2;
    tok.subtokens.push_back(cls);

    const int max_cp = params_.subword_max_cp;
    for (const auto& word : text::whitespace_tokens(sentence)) {
        const auto cps = text::decode_utf8(word.piece);
        const std::size_t n = cps.size();
        std::size_t off = 0;
        bool first = true;
        while (off < n) {
            const std::size_t len =
                std::min<std::size_t>(static_cast<std::size_t>(max_cp), n - off);
            std::string piece;
            if (!first) piece = "##";
            for (std::size_t i = 0; i < len; ++i) text::append_utf8(piece, cps[off + i]);
            Subtoken st;
            st.piece = piece;
            st.cp_start = word.cp_start + off;
            st.cp_end = word.cp_start + off + len;
            st.vocab_id = static_cast<long>(fnv1a64(piece) % 2000000);
            tok.subtokens.push_back(std::move(st));
            off += len;
            first = false;
        }
    }

    Subtoken sep;
    sep.piece = "[SEP]";
    sep.is_marker = true;
    sep.vocab_id = 3;
    const std::size_t end = text::codepoint_count(sentence);
    sep.cp_start = end;
    sep.cp_end = end;
    tok.subtokens.push_back(sep);
    return tok;
}

std::vector<float> SyntheticEncoder::hidden_states(const std::vector<Subtoken>& seq,
                                                   const ExtractionContext& ctx) {
    const std::size_t h = static_cast<std::size_t>(params_.hidden);
    const std::size_t t = seq.size();
    const std::size_t rows = static_cast<std::size_t>(params_.layers) + 1;
    std::vector<float> states(rows * t * h, 0.0f);

    const std::uint64_t seed = params_.seed;
    std::vector<float> row(h);
    for (std::size_t layer = 0; layer < rows; ++layer) {
        for (std::size_t pos = 0; pos < t; ++pos) {
            std::fill(row.begin(), row.end(), 0.0f);
            // token identity + absolute position, present at every layer
            add_keyed_gaussian(row, SeededRng::derive(seed, "piece",
                                                      {fnv1a64(seq[pos].piece), layer}),
                               1.0);
            add_keyed_gaussian(row, SeededRng::derive(seed, "pos", {pos, layer}), 0.25);

            const bool signal_layer =
                static_cast<int>(layer) >= params_.signal_from_layer;
            if (signal_layer && ctx.instance != nullptr) {
                const auto& inst = *ctx.instance;
                add_keyed_gaussian(
                    row,
                    SeededRng::derive(seed, "cls", {fnv1a64(to_string(inst.cls)), layer}),
                    params_.label_signal / std::sqrt(static_cast<double>(h)));
                add_keyed_gaussian(
                    row,
                    SeededRng::derive(seed, "sem",
                                      {fnv1a64(to_string(inst.semantic_label)), layer}),
                    params_.label_signal / std::sqrt(static_cast<double>(h)));
                const bool in_target = pos >= ctx.target.begin && pos < ctx.target.end;
                if (in_target) {
                    add_keyed_gaussian(
                        row,
                        SeededRng::derive(seed, "lemma",
                                          {fnv1a64(text::normalize_lemma(inst.noun_lemma)),
                                           layer}),
                        params_.lemma_signal / std::sqrt(static_cast<double>(h)));
                }
                add_keyed_gaussian(row,
                                   SeededRng::derive(seed, "noise",
                                                     {fnv1a64(inst.id), layer, pos}),
                                   params_.noise / std::sqrt(static_cast<double>(h)));
            }
            float* dst = states.data() + (layer * t + pos) * h;
            for (std::size_t c = 0; c < h; ++c) dst[c] = row[c];
        }
    }
    return states;
}

}  // namespace cxnprobe
