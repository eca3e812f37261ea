#pragma once

#include <stdexcept>
#include <string>

namespace tpsqr {

// Malformed input or a violated data precondition (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Divergence, non-convergence or a truncation tail-bound violation (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tpsqr
