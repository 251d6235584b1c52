#include "tunnel/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include "tunnel/bands.hpp"
#include "tunnel/errors.hpp"

namespace tunnel {

std::string to_string(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::depth_s: return "depth_s";
    case ScanAxis::theta0: return "theta0";
    case ScanAxis::beta: return "beta";
    case ScanAxis::omega_ext: return "omega_ext";
  }
  return "unknown";
}

std::string to_string(Observable observable) {
  switch (observable) {
    case Observable::period: return "period";
    case Observable::delay: return "delay_us";
    case Observable::mzi: return "mzi_ratio";
  }
  return "unknown";
}

ScanAxis parse_axis(const std::string& name) {
  for (auto a : {ScanAxis::depth_s, ScanAxis::theta0, ScanAxis::beta, ScanAxis::omega_ext})
    if (to_string(a) == name) return a;
  throw ParameterError("unknown scan axis '" + name + "'");
}

Observable parse_observable(const std::string& name) {
  if (name == "period") return Observable::period;
  if (name == "delay" || name == "delay_us") return Observable::delay;
  if (name == "mzi" || name == "mzi_ratio") return Observable::mzi;
  throw ParameterError("unknown observable '" + name + "'");
}

double band_period_estimate(double gamma) {
  const auto e = bloch_energies(gamma, 0.0);
  return 4.0 * std::numbers::pi / (e(2) - e(0));
}

ScanSettings with_axis_value(ScanSettings settings, ScanAxis axis, double value) {
  switch (axis) {
    case ScanAxis::depth_s: settings.physical.depth_s = value; break;
    case ScanAxis::theta0: settings.theta0 = value; break;
    case ScanAxis::beta: settings.physical.beta = value; break;
    case ScanAxis::omega_ext: {
      const auto sim = to_dimensionless(settings.physical);
      settings.physical.trap_omega = value / sim.time_unit;
      break;
    }
  }
  return settings;
}

ScanPoint run_point(const ScanSettings& settings, Observable observable) {
  ScanPoint point;
  point.theta0 = settings.theta0;
  try {
    point.params = to_dimensionless(settings.physical);
    const SimParams& sim = point.params;
    const Grid grid(settings.n_points, settings.box_length);
    const Field psi0 = ground_state(grid, sim, settings.ground).psi;

    const double expected = band_period_estimate(sim.gamma);
    EvolutionSpec spec;
    spec.dt = settings.dt;
    spec.t_end = (settings.period_fit.window_periods + 0.5) * expected;
    const double cadence = std::min(sim.from_seconds(settings.snapshot_interval_s), expected / 40.0);
    const auto count = static_cast<std::size_t>(std::floor(spec.t_end / cadence));
    for (std::size_t i = 0; i <= count; ++i) spec.snapshot_times.push_back(cadence * static_cast<double>(i));
    spec.t_end = spec.snapshot_times.back();
    const auto series = quench_and_evolve(psi0, settings.theta0, sim, spec);

    const auto period = extract_period(series, settings.period_fit);
    point.diagnostics["period"] = {{"value", period.period},     {"sigma", period.sigma},
                                   {"guess", period.guess},      {"amplitude", period.amplitude},
                                   {"residual_rms", period.residual_rms}, {"window", period.window},
                                   {"points", period.points},    {"band_estimate", expected}};
    const int orientation = orientation_for(settings.theta0);
    switch (observable) {
      case Observable::period:
        point.value = period.period;
        point.sigma = period.sigma;
        break;
      case Observable::delay: {
        const auto d = extract_delay(series, period.period, sim.time_unit, orientation);
        point.diagnostics["delay"] = {{"resolvable", d.resolvable},   {"delay_us", d.delay_us},
                                      {"t_reflected", d.t_reflected}, {"t_tunneled", d.t_tunneled},
                                      {"valley_ratio", d.valley_ratio}};
        point.value = d.delay_us;
        point.sigma = 0.5 * sim.to_microseconds(cadence);
        if (!d.resolvable) throw NumericalError("unresolvable: D2 overlaps the B remnant");
        break;
      }
      case Observable::mzi: {
        const auto m = mzi_readout(series, period.period, orientation);
        point.diagnostics["mzi"] = {{"defined", m.defined}, {"ratio", m.ratio},         {"phi", m.phi},
                                    {"time", m.time},       {"order_sum", m.order_sum}};
        if (!m.defined) throw NumericalError("MZI readout undefined: order populations below threshold");
        point.value = m.ratio;
        break;
      }
    }
    point.ok = true;
  } catch (const std::exception& e) {
    point.ok = false;
    point.error = e.what();
  }
  return point;
}

ScanResult run_scan(ScanAxis axis, const std::vector<double>& values, const ScanSettings& settings,
                    Observable observable) {
  if (values.empty()) throw ParameterError("scan needs at least one value");
  ScanResult result;
  result.axis = axis;
  result.observable = observable;
  result.points.resize(values.size());

  std::size_t threads = settings.threads ? settings.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      result.points[i] = run_point(with_axis_value(settings, axis, values[i]), observable);
      result.points[i].axis_value = values[i];
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  return result;
}

nlohmann::json ScanResult::to_json() const {
  nlohmann::json j;
  j["axis"] = to_string(axis);
  j["observable"] = to_string(observable);
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    j["points"].push_back({{"axis_value", p.axis_value},
                           {"ok", p.ok},
                           {"error", p.error},
                           {"value", p.value},
                           {"sigma", p.sigma},
                           {"theta0", p.theta0},
                           {"params",
                            {{"gamma", p.params.gamma},
                             {"omega_ext", p.params.omega_ext},
                             {"beta", p.params.beta},
                             {"time_unit", p.params.time_unit},
                             {"length_unit", p.params.length_unit}}},
                           {"diagnostics", p.diagnostics}});
  }
  return j;
}

void ScanResult::write_csv(std::ostream& out) const {
  out << to_string(axis) << ',' << to_string(observable) << ",sigma,status\n" << std::setprecision(17);
  for (const auto& p : points) {
    out << p.axis_value << ',';
    if (p.ok) out << p.value << ',' << p.sigma << ",ok\n";
    else out << "nan,nan," << (p.error.rfind("unresolvable", 0) == 0 ? "unresolvable" : "failed") << '\n';
  }
}

}  // namespace tunnel
