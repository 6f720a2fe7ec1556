#pragma once

namespace cellfit {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Bumped whenever the serialized model layout changes incompatibly.
inline constexpr int kModelFormatVersion = 1;

} // namespace cellfit
