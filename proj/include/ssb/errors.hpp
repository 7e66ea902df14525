#pragma once

#include <stdexcept>

namespace ssb {

// Error taxonomy shared by the library; the CLI maps these onto exit codes.

// Malformed user input: bad grid, off-grid record time, invalid parameter.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Request exceeds the configured resource budget.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite amplitudes or other numerical breakdown.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate regression input.
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation applied to a state that cannot support it (e.g. all-zero vector).
struct invalid_state_error : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace ssb
