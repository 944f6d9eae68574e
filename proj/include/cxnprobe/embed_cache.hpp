#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cxnprobe/encoder.hpp"

namespace cxnprobe {

// On-disk embedding store, one (model_id, mode) pair per store key:
//   <key>.f32      raw little-endian float32, row-major; entry i occupies
//                  (L+1)*H floats starting at i*(L+1)*H*4 bytes
//   <key>.idx.jsonl  header line {format_version, model_id, mode, layers,
//                  hidden, tokenizer_version} followed by one
//                  {id, row, fingerprint} line per entry; for a repeated id
//                  the last line wins (in-place overwrite of the row)
// Byte layout is documented in docs/formats.md.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path dir);

    static std::string store_key(const std::string& model_id, TargetMode mode);

    // Serialized writer; appends or overwrites in place when the id exists.
    void write(const LayerEmbeddingSet& set, const std::string& tokenizer_version);

    // Reads one entry; when expected_fingerprint is given a mismatch is a
    // stale-cache error, a missing entry is not-found either way.
    LayerEmbeddingSet read(const std::string& instance_id, TargetMode mode,
                           const std::string& model_id,
                           std::optional<std::uint64_t> expected_fingerprint = {}) const;

    // Single layer row without loading the whole entry.
    std::vector<float> read_layer(const std::string& instance_id, TargetMode mode,
                                  const std::string& model_id, int layer) const;

    bool contains(const std::string& instance_id, TargetMode mode,
                  const std::string& model_id,
                  std::optional<std::uint64_t> expected_fingerprint = {}) const;

    std::vector<std::string> ids(TargetMode mode, const std::string& model_id) const;

    // Whole store in memory for grid evaluation (one sequential read).
    struct LoadedStore {
        int layers = 0;
        int hidden = 0;
        std::map<std::string, std::size_t> row_of;
        std::vector<float> data;  // rows x (layers+1) x hidden

        const float* row(const std::string& id, int layer) const;
    };
    LoadedStore load_store(TargetMode mode, const std::string& model_id) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    struct Entry {
        std::size_t row = 0;
        std::uint64_t fingerprint = 0;
    };
    struct Store {
        std::string model_id;
        TargetMode mode = TargetMode::Prep;
        int layers = 0;
        int hidden = 0;
        std::string tokenizer_version;
        std::map<std::string, Entry> entries;
        std::size_t rows = 0;
        bool loaded = false;
    };

    Store& store_for(const std::string& model_id, TargetMode mode) const;
    std::filesystem::path data_path(const std::string& key) const;
    std::filesystem::path index_path(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, Store> stores_;
};

}  // namespace cxnprobe
