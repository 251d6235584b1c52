#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tunnel/scan.hpp"

namespace tunnel {

/// Invalid configuration. what() lists every offending key.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Flat run configuration. Units are part of the key names in the file.
struct RunConfig {
  // physical
  double depth_s = 3.21;
  double theta0_deg = 45.0;
  double beta = 1.0;
  double trap_hz = 25.0;
  double lattice_spacing_nm = 532.0;
  double atom_mass_kg = 1.44316060e-25;
  double tof_ms = 25.0;
  // grid and solver
  std::size_t n_points = 4096;
  double box_length = 256.0;
  double dt = 5e-3;
  double tol = 1e-10;
  double ramp_ms = 0.0;  // > 0 loads by adiabatic ramp instead of imaginary time
  double period_window = 4.0;
  // scenario
  std::string preset = "custom";
  std::vector<double> depth_values_s{1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  std::vector<double> theta_values_deg{30.0, 40.0, 50.0, 60.0, 70.0, 80.0};
  std::vector<double> delay_theta_values_deg{20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
  std::vector<double> beta_values{0.1, 1.0};
  std::vector<double> omega_ext_values{1.0 / 50.0, 1.0 / 262.0};
  double depth_sigma_s = 0.12;
  std::string snapshots = "0:130:5us";
  double snapshot_interval_us = 1.0;
  // execution
  std::size_t threads = 0;
  std::string output_dir = "out";

  PhysicalParams physical() const;
  ScanSettings scan_settings() const;
  nlohmann::json to_json() const;
};

/// Parses a flat JSON object. Duplicate keys, unknown keys, wrong types and
/// invalid values are all collected and reported together.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Snapshot schedule "start:stop:step[unit]" with unit us, ms, s or none
/// (dimensionless); stop is inclusive. Returns dimensionless times.
std::vector<double> parse_schedule(const std::string& spec, double time_unit);

}  // namespace tunnel
