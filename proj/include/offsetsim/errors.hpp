#pragma once

#include <stdexcept>
#include <string>

namespace offsetsim {

// Bad or inconsistent configuration (ladders, ranges, fx tables, paths).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates the documented schema or a precondition.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Remote backend could not be reached within the retry budget.
struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace offsetsim
