#pragma once

namespace ukge {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kApiVersion = "1.0.0";

}  // namespace ukge
