#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace tunnel {

/// Raised when a parameter set violates its declared invariants.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double planck = 2.0 * std::numbers::pi * hbar;
inline constexpr double rb87_mass = 1.44316060e-25;  // kg
}  // namespace constants

/// Laboratory-unit description of the lattice experiment.
struct PhysicalParams {
  double atom_mass = constants::rb87_mass;  // kg
  double lattice_spacing = 532e-9;          // m
  double depth_s = 0.0;                     // in units of E_L = h^2 / (2 m d^2)
  double trap_omega = 0.0;                  // rad/s
  double beta = 0.0;                        // dimensionless 1D interaction
  double tof_time = 25e-3;                  // s

  /// Throws ParameterError listing the first violated invariant.
  void validate() const;
  double lattice_energy() const;  // E_L in J
};

/// Dimensionless solver parameters. Lengths are in units of d/4 (lattice
/// period 4) and times in units of m d^2 / (16 hbar).
struct SimParams {
  double gamma = 0.0;
  double omega_ext = 0.0;
  double beta = 0.0;
  double time_unit = 0.0;    // s
  double length_unit = 0.0;  // m

  double depth_s() const;
  double to_seconds(double t) const { return t * time_unit; }
  double to_microseconds(double t) const { return t * time_unit * 1e6; }
  double from_seconds(double t) const { return t / time_unit; }
};

double gamma_from_depth(double depth_s);
double depth_from_gamma(double gamma);

SimParams to_dimensionless(const PhysicalParams& p);
/// Inverse of to_dimensionless. The TOF time has no dimensionless
/// counterpart and is passed through.
PhysicalParams from_dimensionless(const SimParams& sim, double tof_time = 25e-3);

/// Spatial lattice shift (m) produced by a phase jump theta0 in [0, pi].
double theta_to_displacement(double theta0, double lattice_spacing);

/// Distance h t_TOF / (m d) between adjacent momentum orders after free flight.
double tof_fringe_spacing(const PhysicalParams& p);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Time profile of the lattice: amplitude ramp during loading and the phase
/// jump theta(0-) = 0 -> theta(0+) = theta0. Times are dimensionless.
struct PhaseSchedule {
  double gamma = 0.0;
  double theta0 = 0.0;
  double quench_time = 0.0;
  double ramp_start = 0.0;
  double ramp_duration = 0.0;  // zero means the lattice is already at full depth

  double theta(double t) const { return t < quench_time ? 0.0 : theta0; }
  double amplitude(double t) const;
};

/// Smoothstep u^2 (3 - 2u), clamped to [0, 1].
double smoothstep(double u);

}  // namespace tunnel
