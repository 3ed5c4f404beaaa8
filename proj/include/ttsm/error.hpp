#pragma once

#include <stdexcept>
#include <string>

namespace ttsm {

/// Thrown when inputs violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the nonlinear and linear solvers on unrecoverable failures.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ttsm
