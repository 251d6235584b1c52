#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace tunnel {

struct GaussianFit {
  double center = 0.0;
  double width = 0.0;  // standard deviation
  double amplitude = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares of log(y) = a + b x + c x^2 (weights y^2). Points
/// with y <= 0 are skipped. Returns nullopt when fewer than three usable
/// points remain or the curvature is not negative.
std::optional<GaussianFit> fit_gaussian_log(std::span<const double> xs, std::span<const double> ys);

/// Fits the peak around the maximum of ys restricted to xs in [lo, hi]:
/// takes the contiguous run of samples with y >= rel_threshold * max,
/// widened to at least one neighbour on each side.
std::optional<GaussianFit> fit_peak_near_max(std::span<const double> xs, std::span<const double> ys,
                                             double lo, double hi, double rel_threshold = 0.5);

}  // namespace tunnel
