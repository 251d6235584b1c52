#include "tunnel/peak_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tunnel {

std::optional<GaussianFit> fit_gaussian_log(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys differ in length");
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (ys[i] > 0.0 && std::isfinite(ys[i])) use.push_back(i);
  if (use.size() < 3) return std::nullopt;

  // Centre and scale x for conditioning.
  double x_mean = 0.0;
  for (auto i : use) x_mean += xs[i];
  x_mean /= static_cast<double>(use.size());
  double x_scale = 0.0;
  for (auto i : use) x_scale = std::max(x_scale, std::abs(xs[i] - x_mean));
  if (x_scale == 0.0) return std::nullopt;

  Eigen::MatrixXd a(use.size(), 3);
  Eigen::VectorXd b(use.size());
  for (std::size_t r = 0; r < use.size(); ++r) {
    const double u = (xs[use[r]] - x_mean) / x_scale;
    const double w = ys[use[r]];
    a(r, 0) = w;
    a(r, 1) = w * u;
    a(r, 2) = w * u * u;
    b(r) = w * std::log(ys[use[r]]);
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  if (!(c(2) < 0.0)) return std::nullopt;

  const double u0 = -c(1) / (2.0 * c(2));
  GaussianFit fit;
  fit.center = x_mean + u0 * x_scale;
  fit.width = x_scale * std::sqrt(-1.0 / (2.0 * c(2)));
  fit.amplitude = std::exp(c(0) - c(1) * c(1) / (4.0 * c(2)));
  fit.points = use.size();
  return fit;
}

std::optional<GaussianFit> fit_peak_near_max(std::span<const double> xs, std::span<const double> ys,
                                             double lo, double hi, double rel_threshold) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit: xs and ys differ in length");
  std::size_t first = xs.size(), last = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= lo && xs[i] <= hi) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first >= xs.size()) return std::nullopt;
  std::size_t imax = first;
  for (std::size_t i = first; i <= last; ++i)
    if (ys[i] > ys[imax]) imax = i;
  if (!(ys[imax] > 0.0)) return std::nullopt;

  const double cut = rel_threshold * ys[imax];
  std::size_t a = imax, b = imax;
  while (a > first && ys[a - 1] >= cut && ys[a - 1] <= ys[a]) --a;
  while (b < last && ys[b + 1] >= cut && ys[b + 1] <= ys[b]) ++b;
  if (a == imax && a > first) --a;
  if (b == imax && b < last) ++b;
  if (b - a + 1 < 3) return std::nullopt;
  return fit_gaussian_log(xs.subspan(a, b - a + 1), ys.subspan(a, b - a + 1));
}

}  // namespace tunnel
