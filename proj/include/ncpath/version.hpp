#pragma once

namespace ncpath {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ncpath
