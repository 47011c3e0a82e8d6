#pragma once

namespace decomc {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kResultsSchema = "decomc results schema v1";
inline constexpr const char* kConfigSchema = "v1";

} // namespace decomc
