#pragma once

#include <stdexcept>
#include <string>

namespace kerrlab {

/// Bad input: violated preconditions, malformed configuration. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown at run time (NaN, failed convergence). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace kerrlab
