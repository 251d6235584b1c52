#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include "tunnel/field.hpp"
#include "tunnel/peak_fit.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

/// Dimensionless wavenumber of the momentum order n h / d.
inline constexpr double order_wavenumber(int n) { return n * std::numbers::pi / 2.0; }
/// Default half-width of the population window around each order.
inline constexpr double kDefaultOrderWindow = std::numbers::pi / 4.0;

/// Populations Pi_n of momentum orders n = -2..2.
class OrderPopulations {
 public:
  static constexpr int kMaxOrder = 2;

  double operator()(int n) const { return values_.at(static_cast<std::size_t>(n + kMaxOrder)); }
  double& operator()(int n) { return values_.at(static_cast<std::size_t>(n + kMaxOrder)); }
  double total() const;

 private:
  std::array<double, 2 * kMaxOrder + 1> values_{};
};

struct PeakFit {
  int order = 0;
  double center = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
};

/// Momentum density at one hold time. k is ascending with uniform spacing dk.
struct MomentumSnapshot {
  double hold_time = 0.0;
  double dk = 0.0;
  std::vector<double> k;
  std::vector<double> density;
  OrderPopulations populations;
  std::vector<PeakFit> peak_fits;

  double total() const;  // sum density * dk
  double mean_k() const;
  double mean_k2() const;
};

/// Momentum density |psi~(K)|^2 with populations for window half-width
/// `window` and log-quadratic Gaussian fits of every populated order.
MomentumSnapshot momentum_density(const Field& psi, double hold_time = 0.0,
                                  double window = kDefaultOrderWindow);

/// Pi_n = integral of the density over [n pi/2 - w, n pi/2 + w). Windows are
/// half-open so that w = pi/4 tiles the axis without double counting.
/// Throws ParameterError for w > pi/4 (overlapping windows) or w <= 0.
OrderPopulations peak_populations(const MomentumSnapshot& snapshot, double window = kDefaultOrderWindow);

std::vector<PeakFit> fit_order_peaks(const MomentumSnapshot& snapshot, double window = kDefaultOrderWindow);

double expectation_x(const Field& psi);
double expectation_p(const Field& psi);
double kinetic_energy(const Field& psi);
/// <H> = kinetic + sum (V + beta/2 |psi|^2) |psi|^2 dx for potential samples V.
double total_energy(const Field& psi, std::span<const double> potential, double beta);

/// Far-field coordinate x = hbar k t_TOF / m of each snapshot wavenumber (m).
std::vector<double> tof_map(const MomentumSnapshot& snapshot, const PhysicalParams& p);
double tof_position(double k_dimensionless, const PhysicalParams& p);

}  // namespace tunnel
