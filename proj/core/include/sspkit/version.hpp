#pragma once

namespace sspkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sspkit
