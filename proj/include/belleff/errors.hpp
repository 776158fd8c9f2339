#pragma once

#include <stdexcept>
#include <string>

namespace belleff {

/// Raised on malformed user input: bad rationals, shape mismatches,
/// unnormalized distributions, unknown labels, invalid programs.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an enumeration would exceed the configured cap.
/// The message names the offending count and points at the
/// column-generation path for the LP-based bounds.
struct too_large_error : std::runtime_error {
    explicit too_large_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal invariant failures (solver certification, broken postconditions).
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace belleff
