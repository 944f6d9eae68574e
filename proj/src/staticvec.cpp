#include "cxnprobe/staticvec.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cxnprobe/errors.hpp"

namespace cxnprobe {

namespace {

constexpr std::int32_t kFasttextMagic = 793712314;

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw SchemaError("truncated fastText model file");
    return v;
}

std::string read_cstring(std::istream& in) {
    std::string s;
    char c;
    while (in.get(c) && c != 0) s.push_back(c);
    if (!in) throw SchemaError("truncated fastText dictionary");
    return s;
}

// fastText's FNV-1a with the original signed-char sign extension.
std::uint32_t fasttext_hash(const std::string& str) {
    std::uint32_t h = 2166136261u;
    for (char c : str) {
        h ^= static_cast<std::uint32_t>(static_cast<std::int8_t>(c));
        h *= 16777619u;
    }
    return h;
}

}  // namespace

OovPolicy oov_policy_from_string(const std::string& s) {
    if (s == "subword-compose") return OovPolicy::SubwordCompose;
    if (s == "zero-vector") return OovPolicy::ZeroVector;
    if (s == "error") return OovPolicy::Error;
    throw SchemaError("unknown oov policy '" + s + "'");
}

std::string to_string(OovPolicy policy) {
    switch (policy) {
        case OovPolicy::SubwordCompose: return "subword-compose";
        case OovPolicy::ZeroVector: return "zero-vector";
        case OovPolicy::Error: return "error";
    }
    return "?";
}

StaticVectorTable StaticVectorTable::load_text(const std::filesystem::path& path,
                                               OovPolicy policy,
                                               std::string source_id) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open vector file: " + path.string());

    StaticVectorTable t;
    t.policy_ = policy;
    t.source_id_ = std::move(source_id);

    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<float> values;
        double v;
        while (ls >> v) values.push_back(static_cast<float>(v));
        if (first) {
            first = false;
            // optional "count dim" header: a numeric word with exactly one value
            if (values.size() == 1) {
                char* end = nullptr;
                std::strtol(word.c_str(), &end, 10);
                if (end != nullptr && *end == '\0') continue;
            }
        }
        if (values.empty()) {
            throw SchemaError("vector line without values: '" + line + "'");
        }
        if (t.dim_ == 0) {
            t.dim_ = static_cast<int>(values.size());
        } else if (static_cast<int>(values.size()) != t.dim_) {
            throw SchemaError("inconsistent vector dimension for word '" + word + "'");
        }
        for (float x : values) {
            if (!std::isfinite(x)) {
                throw SchemaError("non-finite vector entry for word '" + word + "'");
            }
        }
        if (t.vocab_.count(word)) continue;  // first occurrence wins
        t.vocab_[word] = t.nwords_;
        t.matrix_.insert(t.matrix_.end(), values.begin(), values.end());
        ++t.nwords_;
    }
    if (t.nwords_ == 0) throw SchemaError("empty vector file: " + path.string());
    if (policy == OovPolicy::SubwordCompose) {
        // Text tables carry no n-gram buckets; demote with the documented
        // fallback rather than failing later.
        t.policy_ = OovPolicy::ZeroVector;
    }
    return t;
}

StaticVectorTable StaticVectorTable::load_fasttext_bin(
    const std::filesystem::path& path, OovPolicy policy, std::string source_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot open fastText model: " + path.string());

    const auto magic = read_pod<std::int32_t>(in);
    if (magic != kFasttextMagic) {
        throw SchemaError("not a fastText model (bad magic): " + path.string());
    }
    const auto version = read_pod<std::int32_t>(in);
    if (version > 12) {
        throw CapabilityError("unsupported fastText model version " +
                              std::to_string(version));
    }

    StaticVectorTable t;
    t.policy_ = policy;
    t.source_id_ = std::move(source_id);

    // Args block.
    t.dim_ = read_pod<std::int32_t>(in);
    read_pod<std::int32_t>(in);  // ws
    read_pod<std::int32_t>(in);  // epoch
    read_pod<std::int32_t>(in);  // minCount
    read_pod<std::int32_t>(in);  // neg
    read_pod<std::int32_t>(in);  // wordNgrams
    read_pod<std::int32_t>(in);  // loss
    read_pod<std::int32_t>(in);  // model
    t.bucket_ = read_pod<std::int32_t>(in);
    t.minn_ = read_pod<std::int32_t>(in);
    t.maxn_ = read_pod<std::int32_t>(in);
    read_pod<std::int32_t>(in);  // lrUpdateRate
    read_pod<double>(in);        // t

    // Dictionary.
    const auto size = read_pod<std::int32_t>(in);
    const auto nwords = read_pod<std::int32_t>(in);
    read_pod<std::int32_t>(in);  // nlabels
    read_pod<std::int64_t>(in);  // ntokens
    const auto pruneidx_size = read_pod<std::int64_t>(in);
    for (std::int32_t i = 0; i < size; ++i) {
        const std::string word = read_cstring(in);
        read_pod<std::int64_t>(in);  // count
        read_pod<std::int8_t>(in);   // entry type
        if (i < nwords) t.vocab_[word] = static_cast<std::size_t>(i);
    }
    for (std::int64_t i = 0; i < std::max<std::int64_t>(pruneidx_size, 0); ++i) {
        read_pod<std::int32_t>(in);
        read_pod<std::int32_t>(in);
    }
    t.nwords_ = static_cast<std::size_t>(nwords);

    // Input matrix.
    const auto quant = read_pod<std::int8_t>(in);
    if (quant != 0) {
        throw CapabilityError("quantized fastText models are not supported");
    }
    const auto rows = read_pod<std::int64_t>(in);
    const auto cols = read_pod<std::int64_t>(in);
    if (cols != t.dim_) throw SchemaError("fastText matrix dim mismatch");
    if (rows != static_cast<std::int64_t>(t.nwords_) + t.bucket_) {
        throw SchemaError("fastText matrix row count mismatch");
    }
    t.matrix_.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    in.read(reinterpret_cast<char*>(t.matrix_.data()),
            static_cast<std::streamsize>(t.matrix_.size() * sizeof(float)));
    if (!in) throw SchemaError("truncated fastText input matrix");
    return t;
}

std::vector<float> StaticVectorTable::row(std::size_t index) const {
    const auto d = static_cast<std::size_t>(dim_);
    return std::vector<float>(matrix_.begin() + static_cast<std::ptrdiff_t>(index * d),
                              matrix_.begin() + static_cast<std::ptrdiff_t>((index + 1) * d));
}

bool StaticVectorTable::has_exact(const std::string& word) const {
    return vocab_.count(word) > 0;
}

std::vector<float> StaticVectorTable::compose_subwords(const std::string& word) const {
    if (!supports_subwords()) {
        throw CapabilityError("table '" + source_id_ + "' has no subword buckets");
    }
    std::vector<std::size_t> rows_idx;
    auto it = vocab_.find(word);
    if (it != vocab_.end()) rows_idx.push_back(it->second);

    // fastText n-gram enumeration over "<word>", UTF-8 aware.
    const std::string padded = "<" + word + ">";
    for (std::size_t i = 0; i < padded.size(); ++i) {
        if ((static_cast<unsigned char>(padded[i]) & 0xC0) == 0x80) continue;
        std::string ngram;
        std::size_t j = i;
        for (int n = 1; j < padded.size() && n <= maxn_; ++n) {
            ngram.push_back(padded[j++]);
            while (j < padded.size() &&
                   (static_cast<unsigned char>(padded[j]) & 0xC0) == 0x80) {
                ngram.push_back(padded[j++]);
            }
            if (n >= minn_ && !(n == 1 && (i == 0 || j == padded.size()))) {
                const std::size_t bucket_row =
                    nwords_ + fasttext_hash(ngram) % static_cast<std::uint32_t>(bucket_);
                rows_idx.push_back(bucket_row);
            }
        }
    }
    std::vector<float> out(static_cast<std::size_t>(dim_), 0.0f);
    if (rows_idx.empty()) return out;
    for (std::size_t r : rows_idx) {
        const auto v = row(r);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += v[c];
    }
    const float inv = 1.0f / static_cast<float>(rows_idx.size());
    for (auto& x : out) x *= inv;
    return out;
}

std::vector<float> StaticVectorTable::lookup(const std::string& word) const {
    auto it = vocab_.find(word);
    if (it != vocab_.end()) {
        if (supports_subwords()) return compose_subwords(word);  // fastText semantics
        return row(it->second);
    }
    switch (policy_) {
        case OovPolicy::SubwordCompose:
            if (supports_subwords()) return compose_subwords(word);
            return std::vector<float>(static_cast<std::size_t>(dim_), 0.0f);
        case OovPolicy::ZeroVector:
            return std::vector<float>(static_cast<std::size_t>(dim_), 0.0f);
        case OovPolicy::Error:
            throw DataError("out-of-vocabulary word '" + word + "' in table '" +
                            source_id_ + "'");
    }
    throw Error("unreachable");
}

std::vector<float> lemma_features(const ConstructionInstance& inst,
                                  const StaticVectorTable& table) {
    if (inst.noun_lemma.empty()) throw DataError("instance " + inst.id + " has no lemma");
    return table.lookup(inst.noun_lemma);
}

std::vector<float> form_features(const ConstructionInstance& inst,
                                 const StaticVectorTable& table) {
    if (inst.noun_form.empty()) throw DataError("instance " + inst.id + " has no noun form");
    return table.lookup(inst.noun_form);
}

}  // namespace cxnprobe
