#pragma once

#include <cstddef>
#include <vector>

namespace tunnel {

/// Lattice period in dimensionless length units (cos^2(pi X / 4) repeats every 4).
inline constexpr double kLatticePeriod = 4.0;

/// Uniform periodic grid on [-L/2, L/2). Wavenumbers follow FFT ordering.
class Grid {
 public:
  static constexpr std::size_t kMinPointsPerPeriod = 16;

  Grid(std::size_t n_points, double length);

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  double dk() const;
  double x0() const { return -0.5 * length_; }
  double x(std::size_t j) const { return x0() + static_cast<double>(j) * dx(); }
  /// Wavenumber of FFT bin j: j dk for j < n/2, (j - n) dk otherwise.
  double k(std::size_t j) const;
  /// Signed integer index of FFT bin j (wavenumber in units of dk).
  long k_index(std::size_t j) const;
  std::size_t lattice_sites() const;
  std::size_t points_per_period() const;

  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_;
  double length_;
};

}  // namespace tunnel
