#include "cxnprobe/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe {

std::string to_string(TargetMode m) {
    return m == TargetMode::Prep ? "PREP" : "UNK";
}

TargetMode target_mode_from_string(const std::string& s) {
    if (s == "PREP") return TargetMode::Prep;
    if (s == "UNK") return TargetMode::Unk;
    throw SchemaError("unknown target mode '" + s + "'");
}

TargetSpec make_target(const ConstructionInstance& inst, TargetMode mode) {
    const auto tokens = text::whitespace_tokens(inst.sentence);
    for (const auto& tok : tokens) {
        if (tok.cp_start < inst.span_start || tok.cp_end > inst.span_end) continue;
        if (!text::matches_preposition(tok.piece, inst.prep)) continue;
        // Trim edge punctuation out of the target span.
        const auto [core_start, core_end] = text::strip_edge_punct_span(tok.piece);
        TargetSpec spec;
        spec.mode = mode;
        spec.cp_start = tok.cp_start + core_start;
        spec.cp_end = tok.cp_start + core_end;
        return spec;
    }
    throw DataError("instance " + inst.id + ": prep '" + inst.prep +
                    "' not found as standalone token inside the span");
}

SubtokenRange align_target(const std::string& sentence, std::size_t cp_start,
                           std::size_t cp_end, const Tokenization& tok) {
    if (cp_end <= cp_start) {
        throw DataError("align_target: empty char span");
    }
    (void)sentence;
    std::size_t first = tok.subtokens.size();
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < tok.subtokens.size(); ++i) {
        const auto& st = tok.subtokens[i];
        if (st.is_marker) continue;
        const bool overlap = st.cp_start < cp_end && st.cp_end > cp_start;
        if (overlap) {
            if (!any) first = i;
            last = i;
            any = true;
        }
    }
    if (!any) {
        throw DataError("align_target: no subtoken overlaps span [" +
                        std::to_string(cp_start) + "," + std::to_string(cp_end) + ")");
    }
    for (std::size_t i = first; i <= last; ++i) {
        const auto& st = tok.subtokens[i];
        if (st.is_marker || (st.cp_start < cp_end && st.cp_end > cp_start)) continue;
        throw DataError("align_target: overlapping subtokens are not contiguous");
    }
    // Coverage: the union of subtoken ranges must include the whole span.
    std::size_t cover_start = tok.subtokens[first].cp_start;
    std::size_t cover_end = tok.subtokens[last].cp_end;
    if (cover_start > cp_start || cover_end < cp_end) {
        throw DataError("align_target: tokenization does not cover the span");
    }
    return {first, last + 1};
}

Substitution substitute_unknown(const Tokenization& tok, SubtokenRange aligned,
                                const Encoder& encoder) {
    if (aligned.end > tok.subtokens.size() || aligned.begin >= aligned.end) {
        throw DataError("substitute_unknown: invalid aligned range");
    }
    const std::string unk = encoder.unk_symbol();
    if (unk.empty()) {
        throw CapabilityError("encoder '" + encoder.model_id() +
                              "' has no unknown or mask token to substitute");
    }
    Substitution out;
    out.sequence.reserve(tok.subtokens.size() - aligned.size() + 1);
    for (std::size_t i = 0; i < aligned.begin; ++i) {
        out.sequence.push_back(tok.subtokens[i]);
    }
    Subtoken sub;
    sub.piece = unk;
    sub.cp_start = tok.subtokens[aligned.begin].cp_start;
    sub.cp_end = tok.subtokens[aligned.end - 1].cp_end;
    sub.vocab_id = encoder.unk_vocab_id();
    out.target = {aligned.begin, aligned.begin + 1};
    out.sequence.push_back(sub);
    for (std::size_t i = aligned.end; i < tok.subtokens.size(); ++i) {
        out.sequence.push_back(tok.subtokens[i]);
    }
    return out;
}

std::vector<float> pool_subwords(const float* rows, std::size_t k, std::size_t h) {
    if (k == 0) throw DataError("pool_subwords: empty subtoken range");
    std::vector<float> out(h, 0.0f);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < h; ++c) out[c] += rows[r * h + c];
    }
    const float inv = 1.0f / static_cast<float>(k);
    for (auto& v : out) v *= inv;
    return out;
}

std::vector<float> pool_subwords(const std::vector<std::vector<float>>& rows) {
    if (rows.empty()) throw DataError("pool_subwords: empty subtoken range");
    const std::size_t h = rows.front().size();
    std::vector<float> flat;
    flat.reserve(rows.size() * h);
    for (const auto& r : rows) {
        if (r.size() != h) throw DataError("pool_subwords: ragged rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return pool_subwords(flat.data(), rows.size(), h);
}

std::uint64_t extraction_fingerprint(const std::string& model_id,
                                     const std::string& tokenizer_version,
                                     TargetMode mode, const std::string& sentence) {
    std::uint64_t h = fnv1a64(model_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(tokenizer_version, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(to_string(mode), h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(sentence, h);
    return h;
}

namespace {

// Over-length sequences keep their edge markers and a window of inner
// subtokens centered on the target range.
void truncate_centered(std::vector<Subtoken>& seq, SubtokenRange& target,
                       std::size_t max_len) {
    if (max_len == 0 || seq.size() <= max_len) return;
    std::size_t lead = 0;
    while (lead < seq.size() && seq[lead].is_marker) ++lead;
    std::size_t trail = 0;
    while (trail < seq.size() && seq[seq.size() - 1 - trail].is_marker) ++trail;
    if (lead + trail >= max_len) {
        throw DataError("sequence markers alone exceed the encoder window");
    }
    const std::size_t budget = max_len - lead - trail;
    const std::size_t inner_size = seq.size() - lead - trail;
    if (target.begin < lead || target.end > seq.size() - trail) {
        throw DataError("target range collides with sequence markers");
    }

    const std::size_t mid = (target.begin + target.end) / 2 - lead;
    std::size_t start = mid > budget / 2 ? mid - budget / 2 : 0;
    if (start + budget > inner_size) start = inner_size - budget;
    if (target.begin - lead < start ||
        target.end - lead > start + budget) {
        throw DataError("target range wider than the encoder window");
    }

    std::vector<Subtoken> out;
    out.reserve(max_len);
    for (std::size_t i = 0; i < lead; ++i) out.push_back(seq[i]);
    for (std::size_t i = 0; i < budget; ++i) out.push_back(seq[lead + start + i]);
    for (std::size_t i = 0; i < trail; ++i) out.push_back(seq[seq.size() - trail + i]);
    target.begin = target.begin - start;
    target.end = target.end - start;
    seq = std::move(out);
}

}  // namespace

LayerEmbeddingSet extract_embeddings(Encoder& encoder,
                                     const ConstructionInstance& inst,
                                     const TargetSpec& target) {
    Tokenization tok = encoder.tokenize(inst.sentence);
    SubtokenRange aligned =
        align_target(inst.sentence, target.cp_start, target.cp_end, tok);

    std::vector<Subtoken> seq;
    SubtokenRange range;
    if (target.mode == TargetMode::Unk) {
        Substitution sub = substitute_unknown(tok, aligned, encoder);
        seq = std::move(sub.sequence);
        range = sub.target;
    } else {
        seq = tok.subtokens;
        range = aligned;
    }
    truncate_centered(seq, range, encoder.max_sequence());

    ExtractionContext ctx{&inst, target.mode, range};
    const std::vector<float> states = encoder.hidden_states(seq, ctx);
    const std::size_t h = static_cast<std::size_t>(encoder.hidden_size());
    const std::size_t t = seq.size();
    const std::size_t rows = static_cast<std::size_t>(encoder.n_layers()) + 1;
    if (states.size() != rows * t * h) {
        throw ResourceError("encoder returned a tensor of unexpected size");
    }

    LayerEmbeddingSet set;
    set.instance_id = inst.id;
    set.mode = target.mode;
    set.layers = encoder.n_layers();
    set.hidden = encoder.hidden_size();
    set.model_id = encoder.model_id();
    set.fingerprint = extraction_fingerprint(encoder.model_id(),
                                             encoder.tokenizer_version(),
                                             target.mode, inst.sentence);
    set.matrix.reserve(rows * h);
    for (std::size_t layer = 0; layer < rows; ++layer) {
        const float* base = states.data() + layer * t * h + range.begin * h;
        auto pooled = pool_subwords(base, range.size(), h);
        set.matrix.insert(set.matrix.end(), pooled.begin(), pooled.end());
    }
    for (float v : set.matrix) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite embedding value for instance " + inst.id);
        }
    }
    return set;
}

}  // namespace cxnprobe
