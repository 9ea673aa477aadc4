#pragma once

#include <stdexcept>
#include <string>

namespace prk {

// Shape disagreement between tensors (names both shapes in the message).
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated an operation precondition.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// A pragma configuration failed a validity constraint.
struct ValidityError : std::runtime_error {
    explicit ValidityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad model / run configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File missing or unreadable.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// schema_version of an artifact does not match what this build writes.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invariant broken inside the library itself.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace prk
