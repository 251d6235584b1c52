#include "tunnel/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "tunnel/bands.hpp"
#include "tunnel/classical.hpp"
#include "tunnel/config.hpp"
#include "tunnel/errors.hpp"
#include "tunnel/field_io.hpp"
#include "tunnel/pipeline.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/scan.hpp"

namespace tunnel {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Collects outputs and writes manifest.json into the run directory.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, RunConfig config, std::string out_dir)
      : command_(std::move(command)), argv_(std::move(argv)), config_(std::move(config)), dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
  }
  const RunConfig& config() const { return config_; }
  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }
  // Stem for write_snapshot, which adds .csv and .json.
  fs::path snapshot_stem(const std::string& stem) {
    outputs_.push_back(stem + ".csv");
    outputs_.push_back(stem + ".json");
    return dir_ / stem;
  }
  void write_text(const std::string& name, const std::string& text) {
    std::ofstream f(path(name), std::ios::binary);
    f << text;
    if (!f) throw IoError("cannot write " + (dir_ / name).string());
  }
  void write_json(const std::string& name, const Json& j) { write_text(name, j.dump(2) + "\n"); }
  void finish(const std::string& summary) {
    const std::size_t hw = std::thread::hardware_concurrency();
    Json manifest{{"tool", "tunnelsim"},
                  {"version", kVersion},
                  {"command", command_},
                  {"argv", argv_},
                  {"config", config_.to_json()},
                  {"threads", {{"requested", config_.threads}, {"hardware", hw}, {"fft", "single-threaded per transform"}}},
                  {"outputs", outputs_},
                  {"summary", summary}};
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
    if (!f) throw IoError("cannot write manifest in " + dir_.string());
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  RunConfig config_;
  fs::path dir_;
  std::vector<std::string> outputs_;
};

Field initial_state(const RunConfig& cfg, const SimParams& sim, const Grid& grid) {
  GroundStateOptions opt;
  opt.tol = cfg.tol;
  if (cfg.ramp_ms > 0.0) return adiabatic_load(grid, sim, sim.from_seconds(cfg.ramp_ms * 1e-3), cfg.dt, opt);
  return ground_state(grid, sim, opt).psi;
}

std::string combo_label(double beta, double omega) {
  return "beta" + fmt(beta) + "_omega1/" + fmt(1.0 / omega, 6);
}

std::string cmd_ground_state(Run& run) {
  const auto& cfg = run.config();
  const auto sim = to_dimensionless(cfg.physical());
  const Grid grid(cfg.n_points, cfg.box_length);
  GroundStateOptions opt;
  opt.tol = cfg.tol;
  const auto gs = ground_state(grid, sim, opt);
  write_field_dump(run.path("ground_state.bin"), gs.psi, 0.0);
  const auto proj = project_onto_bands(gs.psi, sim.gamma, 0.0);
  run.write_json("ground_state.json", {{"energy", gs.energy},
                                       {"steps", gs.steps},
                                       {"last_slope", gs.last_slope},
                                       {"x_mean", expectation_x(gs.psi)},
                                       {"bound_fraction", proj.bound_fraction},
                                       {"params", {{"gamma", sim.gamma}, {"omega_ext", sim.omega_ext}, {"beta", sim.beta}}}});
  write_snapshot(run.snapshot_stem("ground_state_momentum"), momentum_density(gs.psi));
  return "E = " + fmt(gs.energy, 10) + " (" + std::to_string(gs.steps) + " imaginary-time steps)";
}

std::string cmd_evolve(Run& run, const std::string& snapshot_flag, const std::string& resume) {
  const auto& cfg = run.config();
  const auto sim = to_dimensionless(cfg.physical());
  const Grid grid(cfg.n_points, cfg.box_length);
  const double theta0 = deg_to_rad(cfg.theta0_deg);
  auto times = parse_schedule(snapshot_flag.empty() ? cfg.snapshots : snapshot_flag, sim.time_unit);
  const Json schedule{{"theta0", theta0}, {"gamma", sim.gamma}, {"omega_ext", sim.omega_ext}, {"beta", sim.beta}};

  Field psi(grid);
  double t_start = 0.0;
  if (!resume.empty()) {
    auto cp = read_checkpoint(resume);
    if (cp.schedule_hash != schedule_hash(schedule))
      throw ConfigError({"resume: checkpoint was written for a different schedule"});
    if (!(cp.psi.grid() == grid)) throw ConfigError({"resume: checkpoint grid differs from the configuration"});
    psi = std::move(cp.psi);
    t_start = cp.time;
  } else {
    psi = initial_state(cfg, sim, grid);
  }

  EvolutionSpec spec;
  spec.dt = cfg.dt;
  for (double t : times)
    if (t >= t_start - 1e-12) spec.snapshot_times.push_back(std::max(0.0, t - t_start));
  if (spec.snapshot_times.empty()) throw ConfigError({"snapshots: no snapshot time after the resume point"});
  spec.t_end = spec.snapshot_times.back();
  spec.schedule.gamma = sim.gamma;
  spec.schedule.theta0 = theta0;

  std::vector<MomentumSnapshot> series;
  std::size_t index = 0;
  evolve(psi, spec, sim.omega_ext, sim.beta, [&](double t, const Field& f) {
    auto snap = momentum_density(f, t + t_start);
    char stem[32];
    std::snprintf(stem, sizeof stem, "snapshot_%03zu", index++);
    write_snapshot(run.snapshot_stem(stem), snap);
    series.push_back(std::move(snap));
  });

  const double period = band_period_estimate(sim.gamma);
  Json tracks = Json::array();
  for (const auto& tr : track_packets(series, period, orientation_for(theta0))) {
    Json centers = Json::array();
    for (double c : tr.centers) centers.push_back(std::isfinite(c) ? Json(c) : Json(nullptr));
    tracks.push_back({{"label", tr.label}, {"order", tr.order}, {"times", tr.times},
                      {"populations", tr.populations}, {"centers", centers}, {"amplitudes", tr.amplitudes}});
  }
  run.write_json("tracks.json", {{"period_estimate", period}, {"orientation", orientation_for(theta0)}, {"tracks", tracks}});

  Checkpoint cp{psi, t_start + spec.t_end, cfg.dt, cfg.to_json(), schedule_hash(schedule)};
  write_checkpoint(run.path("checkpoint"), cp);
  const auto& last = series.back();
  return std::to_string(series.size()) + " snapshots to t = " + fixed(sim.to_microseconds(last.hold_time), 1) +
         " us; <P> = " + fmt(last.mean_k()) + " at the last snapshot";
}

void write_combined_csv(std::ostream& out, const std::string& axis, const std::vector<double>& axis_values,
                        const std::vector<std::pair<std::string, ScanResult>>& results,
                        const std::vector<double>& classical) {
  out << axis;
  for (const auto& [label, r] : results) out << ",period_" << label << ",sigma_" << label;
  if (!classical.empty()) out << ",classical";
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < axis_values.size(); ++i) {
    out << axis_values[i];
    for (const auto& [label, r] : results) {
      const auto& p = r.points[i];
      if (p.ok) out << ',' << p.value << ',' << p.sigma;
      else out << ",nan,nan";
    }
    if (!classical.empty()) out << ',' << classical[i];
    out << '\n';
  }
}

Json results_json(const std::vector<std::pair<std::string, ScanResult>>& results) {
  Json j = Json::array();
  for (const auto& [label, r] : results) {
    auto item = r.to_json();
    item["label"] = label;
    j.push_back(item);
  }
  return j;
}

std::string cmd_scan_period(Run& run) {
  const auto& cfg = run.config();
  std::vector<std::pair<std::string, ScanResult>> results;
  std::size_t failures = 0;
  for (double beta : cfg.beta_values) {
    for (double omega : cfg.omega_ext_values) {
      auto settings = cfg.scan_settings();
      settings.physical.beta = beta;
      settings = with_axis_value(settings, ScanAxis::omega_ext, omega);
      auto r = run_scan(ScanAxis::depth_s, cfg.depth_values_s, settings, Observable::period);
      for (const auto& p : r.points) failures += p.ok ? 0 : 1;
      results.emplace_back(combo_label(beta, omega), std::move(r));
    }
  }
  std::vector<double> classical;
  for (double s : cfg.depth_values_s) classical.push_back(classical_period(s, deg_to_rad(cfg.theta0_deg)));
  std::ostringstream csv;
  write_combined_csv(csv, "depth_s", cfg.depth_values_s, results, classical);
  run.write_text("period_vs_depth.csv", csv.str());
  run.write_json("period_vs_depth.json", results_json(results));
  if (failures) throw NumericalError(std::to_string(failures) + " scan points failed; see period_vs_depth.json");
  return std::to_string(results.size()) + " curves x " + std::to_string(cfg.depth_values_s.size()) +
         " depths written to period_vs_depth.csv";
}

std::string cmd_scan_theta(Run& run) {
  const auto& cfg = run.config();
  std::vector<double> radians;
  for (double d : cfg.theta_values_deg) radians.push_back(deg_to_rad(d));
  auto r = run_scan(ScanAxis::theta0, radians, cfg.scan_settings(), Observable::period);
  std::vector<double> classical;
  for (double t : radians) classical.push_back(classical_period(cfg.depth_s, t));
  std::vector<std::pair<std::string, ScanResult>> results{{"quantum", r}};
  std::ostringstream csv;
  write_combined_csv(csv, "theta0_deg", cfg.theta_values_deg, results, classical);
  run.write_text("period_vs_theta.csv", csv.str());
  run.write_json("period_vs_theta.json", results_json(results));

  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (const auto& p : r.points) {
    if (!p.ok) throw NumericalError("scan point at theta0 = " + fmt(rad_to_deg(p.axis_value)) + " deg failed: " + p.error);
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
    sum += p.value;
  }
  const double spread = (hi - lo) / (sum / static_cast<double>(r.points.size()));
  const double cl_spread = (*std::max_element(classical.begin(), classical.end()) -
                            *std::min_element(classical.begin(), classical.end())) /
                           *std::min_element(classical.begin(), classical.end());
  return "period spread = " + fixed(100 * spread, 2) + " % (classical " + fixed(100 * cl_spread, 1) + " %)";
}

std::string cmd_scan_delay(Run& run) {
  const auto& cfg = run.config();
  std::vector<double> radians;
  for (double d : cfg.delay_theta_values_deg) radians.push_back(deg_to_rad(d));
  auto central = run_scan(ScanAxis::theta0, radians, cfg.scan_settings(), Observable::delay);
  std::vector<ScanResult> band;
  if (cfg.depth_sigma_s > 0.0) {
    for (double ds : {-cfg.depth_sigma_s, cfg.depth_sigma_s}) {
      auto settings = cfg.scan_settings();
      settings.physical.depth_s = cfg.depth_s + ds;
      band.push_back(run_scan(ScanAxis::theta0, radians, settings, Observable::delay));
    }
  }
  std::ostringstream csv;
  csv << "theta0_deg,delay_us,sigma,status,delay_lo_us,delay_hi_us\n" << std::setprecision(17);
  std::string summary;
  for (std::size_t i = 0; i < radians.size(); ++i) {
    const auto& p = central.points[i];
    double lo = NAN, hi = NAN;
    for (const auto& b : band) {
      if (!b.points[i].ok) continue;
      lo = std::isnan(lo) ? b.points[i].value : std::min(lo, b.points[i].value);
      hi = std::isnan(hi) ? b.points[i].value : std::max(hi, b.points[i].value);
    }
    if (p.ok) {
      lo = std::isnan(lo) ? p.value : std::min(lo, p.value);
      hi = std::isnan(hi) ? p.value : std::max(hi, p.value);
    }
    const bool unresolvable = !p.ok && p.error.rfind("unresolvable", 0) == 0;
    csv << cfg.delay_theta_values_deg[i] << ',';
    if (p.ok) csv << p.value << ',' << p.sigma << ",ok,";
    else csv << "nan,nan," << (unresolvable ? "unresolvable" : "failed") << ',';
    csv << lo << ',' << hi << '\n';
    summary += (summary.empty() ? "" : ", ") + fmt(cfg.delay_theta_values_deg[i]) + " deg: " +
               (p.ok ? fixed(p.value, 1) + " us" : std::string(unresolvable ? "unresolvable" : "failed"));
    if (!p.ok && !unresolvable) throw NumericalError("delay scan point failed: " + p.error);
  }
  run.write_text("delay_vs_theta.csv", csv.str());
  Json j{{"central", central.to_json()}, {"band", Json::array()}};
  for (const auto& b : band) j["band"].push_back(b.to_json());
  run.write_json("delay_vs_theta.json", j);
  return "delay " + summary;
}

std::string cmd_mzi(Run& run) {
  const auto& cfg = run.config();
  auto p = run_point(cfg.scan_settings(), Observable::mzi);
  p.axis_value = cfg.theta0_deg;
  ScanResult r;
  r.axis = ScanAxis::theta0;
  r.observable = Observable::mzi;
  r.points.push_back(p);
  run.write_json("mzi.json", r.to_json());
  if (!p.ok) throw NumericalError(p.error);
  const double phi = p.diagnostics["mzi"]["phi"].get<double>();
  return "ratio = " + fixed(p.value, 3) + ", phi = " + fixed(phi, 4) + " (" + fixed(phi / (std::numbers::pi / 5), 3) +
         " pi/5)";
}

std::string cmd_bands(Run& run) {
  const auto& cfg = run.config();
  const auto sim = to_dimensionless(cfg.physical());
  const auto bands = bloch_bands(sim.gamma, 64);
  std::ostringstream csv;
  write_bands_csv(csv, bands, 6);
  run.write_text("bands.csv", csv.str());
  const std::size_t bound = count_bound_states(bands);
  const auto mass = effective_mass(bands, sim.omega_ext);

  const Grid grid(cfg.n_points, cfg.box_length);
  const auto psi = initial_state(cfg, sim, grid);
  const auto proj = project_onto_bands(psi, sim.gamma, deg_to_rad(cfg.theta0_deg));
  Json averages = Json::array();
  for (std::size_t b = 0; b < 6; ++b) averages.push_back(bands.band_average(b));
  auto j = projection_json(proj);
  j["band_averages"] = averages;
  j["bound_states"] = bound;
  j["effective_mass_ratio"] = mass.mass_ratio;
  j["omega_dip"] = mass.omega_dip;
  j["theta0_deg"] = cfg.theta0_deg;
  run.write_json("projection.json", j);
  return "bound states = " + std::to_string(bound) + ", unbound fraction at " + fmt(cfg.theta0_deg) +
         " deg = " + fixed(100 * (1.0 - proj.bound_fraction), 1) + " %";
}

std::string cmd_classical(Run& run) {
  const auto& cfg = run.config();
  std::ostringstream csv;
  csv << "theta0_deg,period,sigma,integrator_period,max_energy_error\n" << std::setprecision(17);
  for (double d : cfg.theta_values_deg) {
    const double t = deg_to_rad(d);
    const auto traj = classical_trajectory(cfg.depth_s, t, classical_time_step(cfg.depth_s, t), 1000);
    csv << d << ',' << classical_period(cfg.depth_s, t) << ",0," << traj.period << ',' << traj.max_energy_error << '\n';
  }
  run.write_text("classical_vs_theta.csv", csv.str());
  std::vector<ClassicalPoint> by_depth;
  for (double s : cfg.depth_values_s) by_depth.push_back({s, classical_period(s, deg_to_rad(cfg.theta0_deg))});
  std::ostringstream csv2;
  write_classical_csv(csv2, "depth_s", by_depth);
  run.write_text("classical_vs_depth.csv", csv2.str());
  const double t = classical_period(cfg.depth_s, deg_to_rad(cfg.theta0_deg));
  return "classical period = " + fixed(t, 4) + " (" + fixed(to_dimensionless(cfg.physical()).to_microseconds(t), 1) +
         " us) at " + fmt(cfg.theta0_deg) + " deg";
}

std::vector<CalibrationPoint> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read calibration table " + path});
  std::string line;
  std::getline(in, line);
  std::vector<CalibrationPoint> table;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
    try {
      const double s = std::stod(a), t = std::stod(b);
      if (std::isfinite(t)) table.push_back({s, t});
    } catch (const std::exception&) {
      throw ConfigError({"calibration table " + path + ": malformed line '" + line + "'"});
    }
  }
  return table;
}

std::string cmd_calibrate(Run& run, double period_us, double period, double sigma, const std::string& table_path) {
  const auto& cfg = run.config();
  const auto sim = to_dimensionless(cfg.physical());
  const bool physical = !std::isnan(period_us);
  const double t_meas = physical ? sim.from_seconds(period_us * 1e-6) : period;
  const double t_sigma = physical ? sim.from_seconds(sigma * 1e-6) : sigma;

  std::vector<CalibrationPoint> table;
  if (!table_path.empty()) {
    table = read_table(table_path);
  } else {
    const auto r = run_scan(ScanAxis::depth_s, cfg.depth_values_s, cfg.scan_settings(), Observable::period);
    for (const auto& p : r.points)
      if (p.ok) table.push_back({p.axis_value, p.value});
    run.write_json("calibration_table.json", r.to_json());
  }
  std::ostringstream csv;
  csv << "depth_s,period\n" << std::setprecision(17);
  for (const auto& p : table) csv << p.depth_s << ',' << p.period << '\n';
  run.write_text("calibration_table.csv", csv.str());

  const auto est = calibrate_depth(t_meas, t_sigma, table);
  run.write_json("calibration.json", {{"period", t_meas},
                                      {"period_sigma", t_sigma},
                                      {"time_unit_us", sim.time_unit * 1e6},
                                      {"depth_s", est.depth_s},
                                      {"depth_sigma", est.sigma},
                                      {"slope", est.slope}});
  return "s0 = " + fixed(est.depth_s, 2) + " ± " + fixed(est.sigma, 2);
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quench dynamics of a condensate in a shifted optical lattice", "tunnelsim"};
  app.require_subcommand(1);
  std::string config_path, out_dir, snapshots, resume, table;
  double period_us = NAN, period = NAN, sigma = 0.0;

  struct Spec {
    const char* name;
    const char* help;
    bool needs_config;
  };
  const Spec specs[] = {
      {"ground-state", "imaginary-time ground state of the loaded lattice", true},
      {"evolve", "quench and write momentum snapshots", true},
      {"scan-period", "dipole period versus depth for each (beta, omega_ext) pair", true},
      {"scan-theta", "dipole period versus quench angle, with the classical curve", true},
      {"scan-delay", "tunneling delay versus quench angle with the depth uncertainty band", true},
      {"mzi", "interferometer readout at the F window", true},
      {"bands", "Bloch bands, bound-state count and band projection", true},
      {"classical", "classical pendulum periods", true},
      {"calibrate", "lattice depth from a measured period", false},
  };
  std::vector<CLI::App*> subs;
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    auto* opt = sub->add_option("-c,--config", config_path, "flat JSON configuration")->check(CLI::ExistingFile);
    if (s.needs_config) opt->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
    subs.push_back(sub);
  }
  subs[1]->add_option("--snapshots", snapshots, "schedule start:stop:step[us|ms|s]");
  subs[1]->add_option("--resume", resume, "checkpoint directory to continue from");
  auto* cal = subs[8];
  auto* o_us = cal->add_option("--period-us", period_us, "measured period in microseconds");
  auto* o_dim = cal->add_option("--period", period, "measured dimensionless period");
  o_us->excludes(o_dim);
  cal->add_option("--sigma", sigma, "period uncertainty, in the unit of the period flag")->check(CLI::NonNegativeNumber);
  cal->add_option("--table", table, "CSV table of depth_s,period (first two columns)")->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (cal->parsed() && std::isnan(period_us) && std::isnan(period))
      throw CLI::ValidationError("calibrate", "one of --period-us or --period is required");
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto selected = app.get_subcommands();
    err << (selected.empty() ? app.help() : selected.front()->help());
    return kExitConfig;
  }

  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    Run run(name, args, cfg, cfg.output_dir);
    std::string summary;
    if (name == "ground-state") summary = cmd_ground_state(run);
    else if (name == "evolve") summary = cmd_evolve(run, snapshots, resume);
    else if (name == "scan-period") summary = cmd_scan_period(run);
    else if (name == "scan-theta") summary = cmd_scan_theta(run);
    else if (name == "scan-delay") summary = cmd_scan_delay(run);
    else if (name == "mzi") summary = cmd_mzi(run);
    else if (name == "bands") summary = cmd_bands(run);
    else if (name == "classical") summary = cmd_classical(run);
    else summary = cmd_calibrate(run, period_us, period, sigma, table);
    run.finish(summary);
    out << summary << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace tunnel
