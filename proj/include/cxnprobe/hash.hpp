#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cxnprobe {

inline constexpr std::uint64_t kFnvOffset64 = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime64 = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset64) {
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime64;
    }
    return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset64) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= kFnvPrime64;
    }
    return h;
}

std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(std::string_view hex);

}  // namespace cxnprobe
