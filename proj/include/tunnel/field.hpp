#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tunnel/grid.hpp"
#include "tunnel/spectral.hpp"

namespace tunnel {

/// Complex wavefunction sampled on a periodic grid, normalized so that
/// sum |psi_j|^2 dx = 1.
class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<Complex> amplitudes);

  static Field from_function(const Grid& grid, const std::function<Complex(double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return psi_.size(); }
  std::span<Complex> amplitudes() { return psi_; }
  std::span<const Complex> amplitudes() const { return psi_; }
  Complex& operator[](std::size_t j) { return psi_[j]; }
  const Complex& operator[](std::size_t j) const { return psi_[j]; }

  double norm_squared() const;
  double norm() const;
  /// Rescales to unit norm. Throws NumericalError on a zero or non-finite field.
  void normalize();

 private:
  Grid grid_;
  std::vector<Complex> psi_;
};

/// <a|b> by trapezoid (exact for periodic grids).
Complex inner_product(const Field& a, const Field& b);
/// |<a|b>|^2 / (|a|^2 |b|^2).
double fidelity(const Field& a, const Field& b);

/// Continuous-transform amplitudes psi~(K_j) = dx/sqrt(2 pi) sum_j psi(x_j) e^{-i K x_j},
/// FFT ordered, so that sum |psi~|^2 dK = sum |psi|^2 dx.
std::vector<Complex> spectral_amplitudes(const Field& psi);
/// Inverse of spectral_amplitudes.
Field field_from_spectral(const Grid& grid, std::span<const Complex> spectral);

}  // namespace tunnel
