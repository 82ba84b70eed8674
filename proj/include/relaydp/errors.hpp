#pragma once

#include <stdexcept>
#include <string>

namespace relaydp {

// Error taxonomy mirrors the CLI exit codes: 1 = configuration,
// 2 = I/O, 3 = numerical failure.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace relaydp
