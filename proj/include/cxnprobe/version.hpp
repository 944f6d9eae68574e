#pragma once

namespace cxnprobe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cxnprobe
