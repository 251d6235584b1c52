#include "tunnel/potential.hpp"

#include <cmath>
#include <numbers>

namespace tunnel {

double Potential::lattice_shape(double x, double theta) {
  const double c = std::cos(std::numbers::pi * x / 4.0 + theta);
  return c * c;
}

double Potential::operator()(double x) const { return trap(x) - gamma * lattice_shape(x, theta); }

std::vector<double> Potential::sample(const Grid& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = (*this)(grid.x(j));
  return v;
}

}  // namespace tunnel
