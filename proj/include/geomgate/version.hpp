#pragma once

namespace geomgate {

inline constexpr const char* kToolName = "geomgate";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace geomgate
