#pragma once
#include <stdexcept>
#include <string>

namespace cellfit {

// Error categories map onto CLI exit codes (io=2, config=3, train=4).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TrainError : std::runtime_error {
    explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cellfit
