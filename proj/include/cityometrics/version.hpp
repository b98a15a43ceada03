#pragma once

namespace cityom {

inline constexpr const char* kToolName = "cityometrics";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kToolStamp = "cityometrics 0.1.0";

}  // namespace cityom
