#pragma once

#include <stdexcept>
#include <string>

namespace ringtheta {

// Bad parameters, schema violations, precondition failures. CLI exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Solver did not converge, tolerance not met, etc. CLI exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be read or written. CLI exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ringtheta
