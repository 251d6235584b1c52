#include "tunnel/pipeline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tunnel/errors.hpp"
#include "tunnel/peak_fit.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

using std::numbers::pi;

int orientation_for(double theta0) { return theta0 > 0.0 ? -1 : 1; }

double oriented_population(const MomentumSnapshot& snap, int n, int orientation) {
  return snap.populations(n * orientation);
}

namespace {

struct SinusoidFit {
  double rss = 0.0;
  Eigen::Vector3d coef = Eigen::Vector3d::Zero();  // c, a, b
};

// Linear least squares of y against 1, cos(4 pi t / T), sin(4 pi t / T).
SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double period) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  const double w = 4.0 * pi / period;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(w * ti);
    a(i, 2) = std::sin(w * ti);
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  SinusoidFit out;
  out.coef = a.colPivHouseholderQr().solve(rhs);
  out.rss = (a * out.coef - rhs).squaredNorm();
  return out;
}

template <typename F>
double golden_minimize(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 100 && hi - lo > 1e-12 * std::abs(hi); ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Twice the median spacing between the minima of the complete runs of y below its mean.
double period_guess(std::span<const double> t, std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> minima;
  std::size_t i = 0;
  while (i < y.size()) {
    if (y[i] >= mean) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::size_t best = i;
    for (; i < y.size() && y[i] < mean; ++i)
      if (y[i] < y[best]) best = i;
    // a run cut off by either end of the series has no reliable minimum
    if (start > 0 && i < y.size()) minima.push_back(t[best]);
  }
  if (minima.size() < 2) throw NumericalError("no oscillation of <P^2> detected");
  std::vector<double> gaps;
  for (std::size_t k = 1; k < minima.size(); ++k) gaps.push_back(minima[k] - minima[k - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
  double median = gaps[gaps.size() / 2];
  if (gaps.size() % 2 == 0) {
    const double lower = *std::max_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2));
    median = 0.5 * (median + lower);
  }
  return 2.0 * median;
}

}  // namespace

PeriodEstimate extract_period(std::span<const double> t, std::span<const double> p2, const PeriodFitOptions& options) {
  if (t.size() != p2.size()) throw ParameterError("period extraction: time and <P^2> series differ in length");
  if (t.size() < 8) throw NumericalError("period extraction needs at least 8 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ParameterError("period extraction: times must increase strictly");
  if (!(options.window_periods > 0.0 && options.search_lo > 0.0 && options.search_hi > options.search_lo &&
        options.search_points >= 3))
    throw ParameterError("invalid period fit options");

  double lo_y = p2[0], hi_y = p2[0];
  for (double v : p2) {
    lo_y = std::min(lo_y, v);
    hi_y = std::max(hi_y, v);
  }
  if (!(hi_y - lo_y > 1e-12 * std::max(1.0, std::abs(hi_y)))) throw NumericalError("no oscillation of <P^2> detected");

  PeriodEstimate out;
  out.guess = period_guess(t, p2);
  const double span = t.back() - t.front();
  if (span < 1.25 * out.guess)
    throw NumericalError("series spans " + std::to_string(span) + ", shorter than 1.25 periods of " +
                         std::to_string(out.guess));

  const double t0 = t.front();
  const double end = t0 + std::min(span, options.window_periods * out.guess);
  std::vector<double> tw, yw;
  for (std::size_t i = 0; i < t.size() && t[i] <= end + 1e-12; ++i) {
    tw.push_back(t[i] - t0);
    yw.push_back(p2[i]);
  }
  out.window = tw.back();
  out.points = tw.size();

  auto rss = [&](double period) { return fit_sinusoid(tw, yw, period).rss; };
  const double lo = options.search_lo * out.guess, hi = options.search_hi * out.guess;
  const double step = (hi - lo) / static_cast<double>(options.search_points - 1);
  double best = lo, best_rss = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < options.search_points; ++k) {
    const double period = lo + step * static_cast<double>(k);
    const double r = rss(period);
    if (r < best_rss) {
      best_rss = r;
      best = period;
    }
  }
  out.period = golden_minimize(rss, std::max(lo, best - step), std::min(hi, best + step));

  const auto fit = fit_sinusoid(tw, yw, out.period);
  const double a = fit.coef(1), b = fit.coef(2);
  out.amplitude = std::hypot(a, b);
  const auto n = static_cast<Eigen::Index>(tw.size());
  out.residual_rms = std::sqrt(fit.rss / static_cast<double>(n));

  const double w = 4.0 * pi / out.period;
  Eigen::MatrixXd jac(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = tw[static_cast<std::size_t>(i)];
    const double c = std::cos(w * ti), s = std::sin(w * ti);
    jac(i, 0) = 1.0;
    jac(i, 1) = c;
    jac(i, 2) = s;
    jac(i, 3) = (a * s - b * c) * w * ti / out.period;
  }
  const double dof = static_cast<double>(n) - 4.0;
  const Eigen::Matrix4d cov = (jac.transpose() * jac).inverse() * (fit.rss / dof);
  out.sigma = std::sqrt(std::max(0.0, cov(3, 3)));
  return out;
}

PeriodEstimate extract_period(const std::vector<MomentumSnapshot>& series, const PeriodFitOptions& options) {
  std::vector<double> t, p2;
  t.reserve(series.size());
  p2.reserve(series.size());
  for (const auto& snap : series) {
    t.push_back(snap.hold_time);
    p2.push_back(snap.mean_k2());
  }
  return extract_period(t, p2, options);
}

DepthEstimate calibrate_depth(double period, double period_sigma, std::vector<CalibrationPoint> table) {
  if (table.size() < 2) throw ParameterError("calibration table needs at least two points");
  if (!(period_sigma >= 0.0)) throw ParameterError("period uncertainty must be non-negative");
  std::sort(table.begin(), table.end(), [](const auto& l, const auto& r) { return l.depth_s < r.depth_s; });
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const auto& p = table[i];
    const auto& q = table[i + 1];
    const double lo = std::min(p.period, q.period), hi = std::max(p.period, q.period);
    if (period < lo || period > hi) continue;
    if (!(q.depth_s > p.depth_s) || p.period == q.period)
      throw ParameterError("calibration table is not strictly monotone around the measured period");
    DepthEstimate out;
    out.slope = (q.period - p.period) / (q.depth_s - p.depth_s);
    out.depth_s = p.depth_s + (period - p.period) / out.slope;
    out.sigma = period_sigma / std::abs(out.slope);
    return out;
  }
  throw ParameterError("period " + std::to_string(period) + " lies outside the calibration table");
}

DelayEstimate extract_delay(std::span<const double> t, std::span<const double> tunneled,
                            std::span<const double> reflected, double period, double time_unit) {
  if (t.size() != tunneled.size() || t.size() != reflected.size())
    throw ParameterError("delay extraction: traces differ in length");
  if (!(period > 0.0 && time_unit > 0.0)) throw ParameterError("delay extraction needs a positive period and time unit");
  const double lo = 0.5 * period, hi = period;

  auto argmax_in = [&](std::span<const double> y, double a, double b, bool open) {
    std::size_t best = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const bool inside = open ? (t[i] > a && t[i] < b) : (t[i] >= a && t[i] <= b);
      if (inside && (best == t.size() || y[i] > y[best])) best = i;
    }
    if (best == t.size()) throw NumericalError("delay extraction: no snapshots inside the D window");
    return best;
  };
  auto refine = [&](std::span<const double> y, std::size_t i) {
    const auto fit = fit_peak_near_max(t, y, lo, hi, 0.5);
    if (fit && fit->center > lo && fit->center < hi) return fit->center;
    return t[i];
  };

  DelayEstimate out;
  const std::size_t i2 = argmax_in(tunneled, lo, hi, true);
  const std::size_t i1 = argmax_in(reflected, lo, hi, true);
  out.t_tunneled = refine(tunneled, i2);
  out.t_reflected = refine(reflected, i1);
  out.delay_us = (out.t_tunneled - out.t_reflected) * time_unit * 1e6;

  const bool interior = i2 > 0 && i2 + 1 < t.size() && t[i2 - 1] > lo && t[i2 + 1] < hi;
  std::size_t ib = i2;
  if (t.front() <= lo) ib = argmax_in(tunneled, t.front(), lo, false);
  double valley = tunneled[i2];
  for (std::size_t i = std::min(ib, i2); i <= i2; ++i) valley = std::min(valley, tunneled[i]);
  out.valley_ratio = tunneled[i2] > 0.0 ? valley / tunneled[i2] : 1.0;
  out.resolvable = interior && out.valley_ratio <= kResolvableValleyRatio;
  return out;
}

DelayEstimate extract_delay(const std::vector<MomentumSnapshot>& series, double period, double time_unit,
                            int orientation) {
  std::vector<double> t, tun, ref;
  for (const auto& snap : series) {
    t.push_back(snap.hold_time);
    tun.push_back(oriented_population(snap, 1, orientation));
    ref.push_back(oriented_population(snap, -1, orientation));
  }
  return extract_delay(t, tun, ref, period, time_unit);
}

double mzi_phase(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ParameterError("MZI ratio must lie in [0, 1]");
  return 0.5 * std::asin(std::sqrt(ratio));
}

MziReadout mzi_readout(const std::vector<MomentumSnapshot>& series, double period, int orientation) {
  if (!(period > 0.0)) throw ParameterError("MZI readout needs a positive period");
  const double lo = 1.125 * period, hi = 1.375 * period;
  const MomentumSnapshot* best = nullptr;
  double best_sum = -1.0;
  for (const auto& snap : series) {
    if (snap.hold_time < lo || snap.hold_time > hi) continue;
    const double sum = oriented_population(snap, 1, orientation) + oriented_population(snap, -1, orientation);
    if (sum > best_sum) {
      best_sum = sum;
      best = &snap;
    }
  }
  MziReadout out;
  if (!best) return out;
  const double total = best->total();
  out.time = best->hold_time;
  out.order_sum = total > 0.0 ? best_sum / total : 0.0;
  if (out.order_sum < kMziPopulationThreshold) return out;
  out.defined = true;
  out.ratio = oriented_population(*best, -1, orientation) / best_sum;
  out.phi = mzi_phase(out.ratio);
  return out;
}

std::array<Complex, 2> apply_splitter(double phi, const std::array<Complex, 2>& in) {
  const Complex c(std::cos(phi), 0.0), s(0.0, std::sin(phi));
  return {c * in[0] + s * in[1], s * in[0] + c * in[1]};
}

std::array<Complex, 2> two_mode_mzi(double phi) {
  if (!(phi >= 0.0 && phi <= pi / 2.0)) throw ParameterError("splitter angle must lie in [0, pi/2]");
  return apply_splitter(phi, apply_splitter(phi, {Complex(1.0, 0.0), Complex(0.0, 0.0)}));
}

const std::vector<PacketWindow>& packet_windows() {
  static const std::vector<PacketWindow> windows{
      {"B", 1, 0.125, 0.375}, {"C", 0, 0.375, 0.625},  {"D1", -1, 0.5, 1.0},
      {"D2", 1, 0.5, 1.0},    {"E", 0, 0.875, 1.125}, {"F", -1, 1.125, 1.375},
  };
  return windows;
}

std::vector<PacketTrack> track_packets(const std::vector<MomentumSnapshot>& series, double period, int orientation) {
  std::vector<PacketTrack> tracks;
  for (const auto& w : packet_windows()) {
    PacketTrack track{w.label, w.order, {}, {}, {}, {}};
    for (const auto& snap : series) {
      if (snap.hold_time < w.begin * period || snap.hold_time > w.end * period) continue;
      track.times.push_back(snap.hold_time);
      track.populations.push_back(oriented_population(snap, w.order, orientation));
      double center = std::numeric_limits<double>::quiet_NaN(), amplitude = 0.0;
      for (const auto& fit : snap.peak_fits) {
        if (fit.order == w.order * orientation) {
          center = fit.center * orientation;
          amplitude = fit.amplitude;
        }
      }
      track.centers.push_back(center);
      track.amplitudes.push_back(amplitude);
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

}  // namespace tunnel
