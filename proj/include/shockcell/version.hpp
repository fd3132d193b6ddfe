#pragma once

namespace shockcell {

inline constexpr const char* kVersion = "0.4.0";

}  // namespace shockcell
