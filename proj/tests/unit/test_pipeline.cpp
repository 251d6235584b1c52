#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tunnel/errors.hpp"
#include "tunnel/pipeline.hpp"

using namespace tunnel;
using std::numbers::pi;

namespace {

constexpr double kTimeUnit = 24.207e-6;

// Momentum density made of Gaussians of width 0.05 at the given centres.
MomentumSnapshot synthetic_snapshot(double t, const std::vector<std::pair<double, double>>& peaks) {
  MomentumSnapshot snap;
  snap.hold_time = t;
  snap.dk = 0.005;
  for (double k = -5.0; k < 5.0; k += snap.dk) {
    double d = 0.0;
    for (const auto& [center, weight] : peaks)
      d += weight * std::exp(-0.5 * (k - center) * (k - center) / 0.0025) / std::sqrt(2 * pi * 0.0025);
    snap.k.push_back(k);
    snap.density.push_back(d);
  }
  snap.populations = peak_populations(snap);
  return snap;
}

std::vector<MomentumSnapshot> oscillating_series(double period, double amplitude, double shift) {
  std::vector<MomentumSnapshot> series;
  for (double t = 0.0; t <= 4.5 * period; t += 0.02)
    series.push_back(synthetic_snapshot(t, {{amplitude * std::sin(2 * pi * (t + shift) / period), 1.0}}));
  return series;
}

std::vector<double> gaussian_trace(const std::vector<double>& t, double center, double width, double height) {
  std::vector<double> y;
  for (double ti : t) y.push_back(height * std::exp(-0.5 * (ti - center) * (ti - center) / (width * width)));
  return y;
}

}  // namespace

TEST_CASE("orientation convention") {
  CHECK(orientation_for(pi / 4) == -1);
  CHECK(orientation_for(-pi / 4) == 1);
  const auto snap = synthetic_snapshot(0.0, {{-pi / 2, 0.7}, {pi / 2, 0.3}});
  CHECK(oriented_population(snap, 1, -1) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(oriented_population(snap, -1, -1) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("period of a synthetic dipole oscillation") {
  const auto est = extract_period(oscillating_series(4.36, 1.0, 0.0));
  CHECK(est.period == doctest::Approx(4.36).epsilon(0.01 / 4.36));
  CHECK(est.sigma < 0.01);
  CHECK(est.guess == doctest::Approx(4.36).epsilon(0.05));
}

TEST_CASE("period is invariant under time shift and amplitude rescaling") {
  const double ref = extract_period(oscillating_series(4.36, 1.0, 0.0)).period;
  CHECK(extract_period(oscillating_series(4.36, 1.0, 0.7)).period == doctest::Approx(ref).epsilon(1e-3));
  CHECK(extract_period(oscillating_series(4.36, 0.4, 0.0)).period == doctest::Approx(ref).epsilon(1e-3));
}

TEST_CASE("period fit tolerates noise") {
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> t, y;
  for (double ti = 0.0; ti <= 20.0; ti += 0.05) {
    t.push_back(ti);
    y.push_back(0.5 - 0.5 * std::cos(4 * pi * ti / 4.4) + noise(rng));
  }
  const auto est = extract_period(t, y);
  CHECK(std::abs(est.period - 4.4) < 5 * est.sigma + 1e-3);
  CHECK(est.sigma > 0.0);
}

TEST_CASE("period extraction rejects flat and short series") {
  std::vector<double> t, flat;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    flat.push_back(1.0);
  }
  CHECK_THROWS_AS(extract_period(t, flat), NumericalError);
  std::vector<double> short_t, short_y;
  for (double ti = 0.0; ti <= 5.0; ti += 0.05) {
    short_t.push_back(ti);
    short_y.push_back(std::cos(4 * pi * ti / 4.36));
  }
  CHECK_THROWS_AS(extract_period(short_t, short_y), NumericalError);
  CHECK_THROWS_AS(extract_period(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1}), ParameterError);
}

TEST_CASE("depth calibration by table inversion") {
  const std::vector<CalibrationPoint> table{{2.0, 5.0}, {3.0, 4.5}, {4.0, 4.2}};
  SUBCASE("exact table point") {
    const auto est = calibrate_depth(4.5, 0.1, table);
    CHECK(est.depth_s == doctest::Approx(3.0));
  }
  SUBCASE("interpolation and error propagation") {
    const auto est = calibrate_depth(4.35, 0.06, table);
    CHECK(est.depth_s == doctest::Approx(3.5));
    CHECK(est.slope == doctest::Approx(-0.3));
    CHECK(est.sigma == doctest::Approx(0.2));
  }
  SUBCASE("increasing and unsorted tables") {
    const std::vector<CalibrationPoint> rising{{4.0, 6.0}, {2.0, 4.0}};
    CHECK(calibrate_depth(5.0, 0.0, rising).depth_s == doctest::Approx(3.0));
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(calibrate_depth(5.5, 0.1, table), ParameterError);
    CHECK_THROWS_AS(calibrate_depth(4.0, 0.1, table), ParameterError);
    CHECK_THROWS_AS(calibrate_depth(4.5, 0.1, {{3.0, 4.5}}), ParameterError);
  }
}

TEST_CASE("delay between two synthetic traces") {
  const double period = 4.36;
  const double ten_us = 10e-6 / kTimeUnit;
  std::vector<double> t;
  for (double ti = 0.0; ti <= 1.5 * period; ti += 1e-6 / kTimeUnit) t.push_back(ti);
  const double t1 = 0.68 * period;
  auto tunneled = gaussian_trace(t, 0.25 * period, 0.2, 0.6);
  const auto d2 = gaussian_trace(t, t1 + ten_us, 0.2, 0.3);
  for (std::size_t i = 0; i < t.size(); ++i) tunneled[i] += d2[i];
  const auto reflected = gaussian_trace(t, t1, 0.2, 0.5);

  const auto est = extract_delay(t, tunneled, reflected, period, kTimeUnit);
  CHECK(est.resolvable);
  CHECK(est.delay_us == doctest::Approx(10.0).epsilon(0.05));
  CHECK(est.valley_ratio < kResolvableValleyRatio);

  SUBCASE("swapping the traces flips the sign") {
    const auto swapped = extract_delay(t, reflected, tunneled, period, kTimeUnit);
    CHECK(swapped.delay_us == doctest::Approx(-est.delay_us).epsilon(1e-6));
  }
  SUBCASE("a merged B and D2 is unresolvable") {
    std::vector<double> merged = gaussian_trace(t, 0.45 * period, 0.8, 1.0);
    CHECK_FALSE(extract_delay(t, merged, reflected, period, kTimeUnit).resolvable);
  }
  SUBCASE("a D2 still rising at the window edge is unresolvable") {
    const auto late = gaussian_trace(t, 1.1 * period, 0.3, 1.0);
    CHECK_FALSE(extract_delay(t, late, reflected, period, kTimeUnit).resolvable);
  }
}

TEST_CASE("MZI readout") {
  const double period = 4.36;
  const double t_f = 1.25 * period;
  // orientation -1: oriented order -1 sits at raw +pi/2
  SUBCASE("pure states") {
    const std::vector<MomentumSnapshot> reflected{synthetic_snapshot(t_f, {{pi / 2, 1.0}})};
    CHECK(mzi_readout(reflected, period, -1).ratio == doctest::Approx(1.0));
    const std::vector<MomentumSnapshot> tunneled{synthetic_snapshot(t_f, {{-pi / 2, 1.0}})};
    const auto r = mzi_readout(tunneled, period, -1);
    CHECK(r.defined);
    CHECK(r.ratio == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.phi == doctest::Approx(0.0));
  }
  SUBCASE("ratio and phase") {
    const std::vector<MomentumSnapshot> s{synthetic_snapshot(t_f, {{pi / 2, 0.9}, {-pi / 2, 0.1}})};
    const auto r = mzi_readout(s, period, -1);
    CHECK(r.ratio == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(r.phi == doctest::Approx(0.5 * std::asin(std::sqrt(0.9))).epsilon(1e-6));
  }
  SUBCASE("invariant under renormalization") {
    const std::vector<MomentumSnapshot> a{synthetic_snapshot(t_f, {{pi / 2, 0.6}, {-pi / 2, 0.2}, {0.0, 0.2}})};
    const std::vector<MomentumSnapshot> b{synthetic_snapshot(t_f, {{pi / 2, 6.0}, {-pi / 2, 2.0}, {0.0, 2.0}})};
    CHECK(mzi_readout(a, period, -1).ratio == doctest::Approx(mzi_readout(b, period, -1).ratio).epsilon(1e-12));
  }
  SUBCASE("undefined below the population threshold") {
    const std::vector<MomentumSnapshot> s{synthetic_snapshot(t_f, {{0.0, 0.95}, {pi / 2, 0.05}})};
    CHECK_FALSE(mzi_readout(s, period, -1).defined);
  }
  SUBCASE("snapshots outside the F window are ignored") {
    const std::vector<MomentumSnapshot> s{synthetic_snapshot(period, {{pi / 2, 1.0}})};
    CHECK_FALSE(mzi_readout(s, period, -1).defined);
  }
  CHECK(mzi_phase(0.91) == doctest::Approx(0.6332).epsilon(1e-3));
  CHECK_THROWS_AS(mzi_phase(1.5), ParameterError);
}

TEST_CASE("two-mode MZI") {
  for (double phi : {0.0, 0.3, pi / 5, pi / 4, 1.2}) {
    const auto out = two_mode_mzi(phi);
    CHECK(std::norm(out[0]) + std::norm(out[1]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::norm(out[1]) == doctest::Approx(std::pow(std::sin(2 * phi), 2)).epsilon(1e-14));
    CHECK(mzi_phase(std::norm(out[1])) == doctest::Approx(std::min(phi, pi / 2 - phi)).epsilon(1e-9));
  }
  std::array<Complex, 2> state{Complex(0.6, 0.0), Complex(0.0, 0.8)};
  for (int i = 0; i < 4; ++i) state = apply_splitter(pi / 4, state);
  CHECK(std::norm(state[0]) == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(std::norm(state[1]) == doctest::Approx(0.64).epsilon(1e-14));
  CHECK_THROWS_AS(two_mode_mzi(-0.1), ParameterError);
  CHECK_THROWS_AS(two_mode_mzi(2.0), ParameterError);
}

TEST_CASE("packet tracking windows") {
  const double period = 4.0;
  std::vector<MomentumSnapshot> series;
  for (double t = 0.0; t <= 1.5 * period; t += 0.25) series.push_back(synthetic_snapshot(t, {{-pi / 2, 1.0}}));
  const auto tracks = track_packets(series, period, -1);
  REQUIRE(tracks.size() == packet_windows().size());
  CHECK(tracks[0].label == "B");
  CHECK(tracks[0].times.front() >= 0.125 * period);
  CHECK(tracks[0].times.back() <= 0.375 * period);
  for (double p : tracks[0].populations) CHECK(p == doctest::Approx(1.0).epsilon(1e-6));
  for (double p : tracks[1].populations) CHECK(p == doctest::Approx(0.0));
}
