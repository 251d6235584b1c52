#include "tunnel/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tunnel/units.hpp"

namespace tunnel {

namespace {
bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(std::size_t n_points, double length) : n_(n_points), length_(length) {
  if (!is_power_of_two(n_))
    throw ParameterError("grid n_points must be a power of two, got " + std::to_string(n_));
  if (!(length_ > 0.0)) throw ParameterError("grid length must be positive");
  const double periods = length_ / kLatticePeriod;
  if (std::abs(periods - std::round(periods)) > 1e-9 || std::round(periods) < 1.0)
    throw ParameterError("grid length must be an integer multiple of the lattice period 4");
  if (n_ < kMinPointsPerPeriod * lattice_sites())
    throw ParameterError("grid needs at least 16 points per lattice period");
}

double Grid::dk() const { return 2.0 * std::numbers::pi / length_; }

long Grid::k_index(std::size_t j) const {
  return j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
}

double Grid::k(std::size_t j) const { return static_cast<double>(k_index(j)) * dk(); }

std::size_t Grid::lattice_sites() const {
  return static_cast<std::size_t>(std::llround(length_ / kLatticePeriod));
}

std::size_t Grid::points_per_period() const { return n_ / lattice_sites(); }

std::vector<double> Grid::positions() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
  return out;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = k(j);
  return out;
}

}  // namespace tunnel
