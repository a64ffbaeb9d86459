#pragma once

namespace afree {

inline constexpr const char* kVersion = "0.1.0";

} // namespace afree
