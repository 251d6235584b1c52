#pragma once

#include <stdexcept>

namespace tunnel {

/// Failure of a numerical procedure: non-finite values, non-convergence,
/// or a basis too small for the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tunnel
