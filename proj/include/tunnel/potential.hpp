#pragma once

#include <vector>

#include "tunnel/grid.hpp"

namespace tunnel {

/// V(X) = omega_ext^2 X^2 / 2 - gamma cos^2(pi X / 4 + theta).
/// The lattice term spans [-gamma, 0]; its barrier top is 0.
struct Potential {
  double gamma = 0.0;
  double theta = 0.0;
  double omega_ext = 0.0;

  double operator()(double x) const;
  double trap(double x) const { return 0.5 * omega_ext * omega_ext * x * x; }
  static double lattice_shape(double x, double theta);  // cos^2(pi x / 4 + theta)
  std::vector<double> sample(const Grid& grid) const;
};

}  // namespace tunnel
