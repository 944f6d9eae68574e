#include "cxnprobe/embed_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache layout is little-endian; big-endian hosts need a swap pass");
static_assert(sizeof(float) == 4, "cache layout assumes 32-bit floats");

namespace cxnprobe {

namespace {
constexpr int kFormatVersion = 1;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string EmbeddingCache::store_key(const std::string& model_id, TargetMode mode) {
    std::string sanitized;
    for (char c : model_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
        sanitized.push_back(ok ? c : '-');
    }
    if (sanitized.size() > 80) sanitized.resize(80);
    // hash suffix keeps distinct ids distinct after sanitizing
    return sanitized + "-" + to_hex(fnv1a64(model_id)).substr(8) + "__" + to_string(mode);
}

std::filesystem::path EmbeddingCache::data_path(const std::string& key) const {
    return dir_ / (key + ".f32");
}

std::filesystem::path EmbeddingCache::index_path(const std::string& key) const {
    return dir_ / (key + ".idx.jsonl");
}

EmbeddingCache::Store& EmbeddingCache::store_for(const std::string& model_id,
                                                 TargetMode mode) const {
    const std::string key = store_key(model_id, mode);
    Store& store = stores_[key];
    if (store.loaded) return store;
    store.model_id = model_id;
    store.mode = mode;
    const auto idx = index_path(key);
    if (std::filesystem::exists(idx)) {
        auto records = io::read_jsonl(idx);
        if (records.empty()) throw IntegrityError("empty cache index: " + idx.string());
        const auto& header = records.front();
        if (header.value("format_version", 0) != kFormatVersion) {
            throw StaleCacheError("unsupported cache format in " + idx.string());
        }
        if (header.at("model_id").get<std::string>() != model_id) {
            throw StaleCacheError("cache index belongs to model '" +
                                  header.at("model_id").get<std::string>() +
                                  "', expected '" + model_id + "'");
        }
        store.layers = header.at("layers").get<int>();
        store.hidden = header.at("hidden").get<int>();
        store.tokenizer_version = header.value("tokenizer_version", "");
        for (std::size_t i = 1; i < records.size(); ++i) {
            const auto& rec = records[i];
            Entry e;
            e.row = rec.at("row").get<std::size_t>();
            e.fingerprint = from_hex(rec.at("fingerprint").get<std::string>());
            store.entries[rec.at("id").get<std::string>()] = e;
            store.rows = std::max(store.rows, e.row + 1);
        }
    }
    store.loaded = true;
    return store;
}

void EmbeddingCache::write(const LayerEmbeddingSet& set,
                           const std::string& tokenizer_version) {
    std::lock_guard<std::mutex> lock(mutex_);
    Store& store = store_for(set.model_id, set.mode);
    const std::string key = store_key(set.model_id, set.mode);

    const bool fresh = store.entries.empty() && store.rows == 0;
    if (fresh) {
        store.layers = set.layers;
        store.hidden = set.hidden;
        store.tokenizer_version = tokenizer_version;
        nlohmann::json header{{"format_version", kFormatVersion},
                              {"model_id", set.model_id},
                              {"mode", to_string(set.mode)},
                              {"layers", set.layers},
                              {"hidden", set.hidden},
                              {"tokenizer_version", tokenizer_version}};
        io::write_file(index_path(key), header.dump() + "\n");
        std::ofstream(data_path(key), std::ios::binary | std::ios::trunc);
    } else if (store.layers != set.layers || store.hidden != set.hidden) {
        throw IntegrityError("cache store " + key + " holds " +
                             std::to_string(store.layers) + "x" +
                             std::to_string(store.hidden) + " entries, got " +
                             std::to_string(set.layers) + "x" +
                             std::to_string(set.hidden));
    }

    const std::size_t entry_floats = static_cast<std::size_t>(set.layers + 1) *
                                     static_cast<std::size_t>(set.hidden);
    if (set.matrix.size() != entry_floats) {
        throw IntegrityError("embedding matrix has wrong size for cache entry");
    }

    std::size_t row;
    auto it = store.entries.find(set.instance_id);
    if (it != store.entries.end()) {
        row = it->second.row;  // in-place overwrite
    } else {
        row = store.rows;
    }

    {
        std::fstream data(data_path(key),
                          std::ios::binary | std::ios::in | std::ios::out);
        if (!data) throw ResourceError("cannot open cache data: " + data_path(key).string());
        data.seekp(static_cast<std::streamoff>(row * entry_floats * sizeof(float)));
        data.write(reinterpret_cast<const char*>(set.matrix.data()),
                   static_cast<std::streamsize>(entry_floats * sizeof(float)));
        if (!data) throw ResourceError("cache write failed: " + data_path(key).string());
    }
    {
        std::ofstream idx(index_path(key), std::ios::app);
        nlohmann::json rec{{"id", set.instance_id},
                           {"row", row},
                           {"fingerprint", to_hex(set.fingerprint)}};
        idx << rec.dump() << "\n";
        if (!idx) throw ResourceError("cache index write failed");
    }
    store.entries[set.instance_id] = {row, set.fingerprint};
    store.rows = std::max(store.rows, row + 1);
}

LayerEmbeddingSet EmbeddingCache::read(
    const std::string& instance_id, TargetMode mode, const std::string& model_id,
    std::optional<std::uint64_t> expected_fingerprint) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const Store& store = store_for(model_id, mode);
    auto it = store.entries.find(instance_id);
    if (it == store.entries.end()) {
        throw NotFoundError("cache miss: " + instance_id + " (" + to_string(mode) +
                            ", " + model_id + ")");
    }
    if (expected_fingerprint && it->second.fingerprint != *expected_fingerprint) {
        throw StaleCacheError("stale cache entry for " + instance_id +
                              ": fingerprint mismatch");
    }

    LayerEmbeddingSet set;
    set.instance_id = instance_id;
    set.mode = mode;
    set.model_id = model_id;
    set.layers = store.layers;
    set.hidden = store.hidden;
    set.fingerprint = it->second.fingerprint;
    const std::size_t entry_floats = static_cast<std::size_t>(store.layers + 1) *
                                     static_cast<std::size_t>(store.hidden);
    set.matrix.resize(entry_floats);

    const std::string key = store_key(model_id, mode);
    std::ifstream data(data_path(key), std::ios::binary);
    if (!data) throw ResourceError("cannot open cache data: " + data_path(key).string());
    data.seekg(static_cast<std::streamoff>(it->second.row * entry_floats * sizeof(float)));
    data.read(reinterpret_cast<char*>(set.matrix.data()),
              static_cast<std::streamsize>(entry_floats * sizeof(float)));
    if (data.gcount() != static_cast<std::streamsize>(entry_floats * sizeof(float))) {
        throw IntegrityError("cache data truncated for " + instance_id);
    }
    return set;
}

std::vector<float> EmbeddingCache::read_layer(const std::string& instance_id,
                                              TargetMode mode,
                                              const std::string& model_id,
                                              int layer) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const Store& store = store_for(model_id, mode);
    auto it = store.entries.find(instance_id);
    if (it == store.entries.end()) {
        throw NotFoundError("cache miss: " + instance_id);
    }
    if (layer < 0 || layer > store.layers) {
        throw Error("layer " + std::to_string(layer) + " out of range [0," +
                    std::to_string(store.layers) + "]");
    }
    const std::size_t entry_floats = static_cast<std::size_t>(store.layers + 1) *
                                     static_cast<std::size_t>(store.hidden);
    std::vector<float> row(static_cast<std::size_t>(store.hidden));
    const std::string key = store_key(model_id, mode);
    std::ifstream data(data_path(key), std::ios::binary);
    if (!data) throw ResourceError("cannot open cache data: " + data_path(key).string());
    const std::size_t offset =
        (it->second.row * entry_floats +
         static_cast<std::size_t>(layer) * static_cast<std::size_t>(store.hidden)) *
        sizeof(float);
    data.seekg(static_cast<std::streamoff>(offset));
    data.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (data.gcount() != static_cast<std::streamsize>(row.size() * sizeof(float))) {
        throw IntegrityError("cache data truncated for " + instance_id);
    }
    return row;
}

bool EmbeddingCache::contains(const std::string& instance_id, TargetMode mode,
                              const std::string& model_id,
                              std::optional<std::uint64_t> expected_fingerprint) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const Store& store = store_for(model_id, mode);
    auto it = store.entries.find(instance_id);
    if (it == store.entries.end()) return false;
    return !expected_fingerprint || it->second.fingerprint == *expected_fingerprint;
}

std::vector<std::string> EmbeddingCache::ids(TargetMode mode,
                                             const std::string& model_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const Store& store = store_for(model_id, mode);
    std::vector<std::string> out;
    out.reserve(store.entries.size());
    for (const auto& [id, entry] : store.entries) out.push_back(id);
    return out;
}

const float* EmbeddingCache::LoadedStore::row(const std::string& id, int layer) const {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw NotFoundError("cache miss: " + id);
    const std::size_t entry_floats = static_cast<std::size_t>(layers + 1) *
                                     static_cast<std::size_t>(hidden);
    return data.data() + it->second * entry_floats +
           static_cast<std::size_t>(layer) * static_cast<std::size_t>(hidden);
}

EmbeddingCache::LoadedStore EmbeddingCache::load_store(
    TargetMode mode, const std::string& model_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const Store& store = store_for(model_id, mode);
    LoadedStore out;
    out.layers = store.layers;
    out.hidden = store.hidden;
    const std::size_t entry_floats = static_cast<std::size_t>(store.layers + 1) *
                                     static_cast<std::size_t>(store.hidden);
    out.data.resize(store.rows * entry_floats);
    const std::string key = store_key(model_id, mode);
    if (store.rows > 0) {
        std::ifstream data(data_path(key), std::ios::binary);
        if (!data) throw ResourceError("cannot open cache data: " + data_path(key).string());
        data.read(reinterpret_cast<char*>(out.data.data()),
                  static_cast<std::streamsize>(out.data.size() * sizeof(float)));
        if (data.gcount() !=
            static_cast<std::streamsize>(out.data.size() * sizeof(float))) {
            throw IntegrityError("cache data truncated in " + data_path(key).string());
        }
    }
    for (const auto& [id, entry] : store.entries) out.row_of[id] = entry.row;
    return out;
}

}  // namespace cxnprobe
