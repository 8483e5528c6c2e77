// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kglab {

/// Invalid grid, weights, or run configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An operation was called with input outside its domain (wrong parity,
/// missing orthogonality, ...).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A trace or checkpoint file does not match the expected layout.
struct SchemaError : ConfigError {
    using ConfigError::ConfigError;
};

struct GridMismatch : std::invalid_argument {
    GridMismatch() : std::invalid_argument("grid functions live on different grids") {}
};

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the time stepper when the state stops being finite.
struct BlowUpError : std::runtime_error {
    BlowUpError(double last_valid_time, const std::string& what)
        : std::runtime_error(what), last_valid_time(last_valid_time) {}
    double last_valid_time;
};

/// Shooting bracket does not straddle the manifold.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kglab
