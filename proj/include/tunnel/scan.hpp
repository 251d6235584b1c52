#pragma once

#include <cstddef>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "tunnel/grid.hpp"
#include "tunnel/pipeline.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

enum class ScanAxis { depth_s, theta0, beta, omega_ext };
enum class Observable { period, delay, mzi };

std::string to_string(ScanAxis axis);
std::string to_string(Observable observable);
ScanAxis parse_axis(const std::string& name);
Observable parse_observable(const std::string& name);

/// Everything a scan point needs besides the swept value.
struct ScanSettings {
  PhysicalParams physical;
  double theta0 = 0.7853981633974483;  // radians
  std::size_t n_points = 4096;
  double box_length = 256.0;
  double dt = kDefaultTimeStep;
  GroundStateOptions ground;
  PeriodFitOptions period_fit;
  double snapshot_interval_s = 1e-6;  // physical cadence of momentum snapshots
  std::size_t threads = 0;            // 0: hardware concurrency
};

struct ScanPoint {
  double axis_value = 0.0;
  SimParams params;
  double theta0 = 0.0;
  bool ok = false;
  std::string error;
  double value = 0.0;
  double sigma = 0.0;
  nlohmann::json diagnostics;
};

struct ScanResult {
  ScanAxis axis = ScanAxis::depth_s;
  Observable observable = Observable::period;
  std::vector<ScanPoint> points;

  nlohmann::json to_json() const;
  /// Columns: axis, observable, sigma, status.
  void write_csv(std::ostream& out) const;
};

/// Expected dipole period 4 pi / (E2(0) - E0(0)) from the Bloch spectrum,
/// used to size the simulated time span.
double band_period_estimate(double gamma);

/// Applies the swept value to a copy of the settings (theta0 in radians,
/// omega_ext as the dimensionless trap frequency).
ScanSettings with_axis_value(ScanSettings settings, ScanAxis axis, double value);

/// One point: ground state, quench, snapshot series, extractor. Failures are
/// caught and recorded in the point.
ScanPoint run_point(const ScanSettings& settings, Observable observable);

/// Runs every value on a pool of worker threads. Each point owns its fields,
/// so results do not depend on the thread count.
ScanResult run_scan(ScanAxis axis, const std::vector<double>& values, const ScanSettings& settings,
                    Observable observable);

}  // namespace tunnel
