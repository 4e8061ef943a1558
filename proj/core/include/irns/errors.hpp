#pragma once

#include <stdexcept>
#include <string>

namespace irns {

// Requested more realizations than a bounded sample space provides.
struct SampleExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A guaranteed algorithm invariant failed at runtime; indicates a bug in
// the caller or upstream state, not a recoverable condition.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Backtracking fell below alpha_min without an accepted step.
struct LineSearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict mode: the restoration growth bound was violated.
struct BetaViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace irns
