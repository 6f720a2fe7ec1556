#pragma once
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "cellfit/errors.hpp"

namespace cellfit::detail {

// Shortest round-trip decimal for a double: stable bytes across platforms
// and serializer versions, parses back to the identical bit pattern.
// Infinities use the "inf"/"-inf" sentinels interval bounds depend on.
inline std::string dtos(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double stod_exact(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("malformed numeric literal: '" + s + "'");
    return v;
}

// fixed six-decimal rendering for human-facing tables
inline std::string fixed6(double v) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf, static_cast<size_t>(len));
}

} // namespace cellfit::detail
