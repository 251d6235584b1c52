#include "tunnel/units.hpp"

#include <algorithm>
#include <cmath>

namespace tunnel {

namespace {
constexpr double pi = std::numbers::pi;
}

void PhysicalParams::validate() const {
  if (!(atom_mass > 0.0)) throw ParameterError("atom_mass must be positive");
  if (!(lattice_spacing > 0.0)) throw ParameterError("lattice_spacing must be positive");
  if (!(depth_s >= 0.0)) throw ParameterError("depth_s must be non-negative");
  if (!(trap_omega >= 0.0)) throw ParameterError("trap frequency must be non-negative");
  if (!(beta >= 0.0)) throw ParameterError("beta must be non-negative");
  if (!(tof_time >= 0.0)) throw ParameterError("tof time must be non-negative");
}

double PhysicalParams::lattice_energy() const {
  return constants::planck * constants::planck / (2.0 * atom_mass * lattice_spacing * lattice_spacing);
}

double SimParams::depth_s() const { return depth_from_gamma(gamma); }

double gamma_from_depth(double depth_s) { return pi * pi * depth_s / 8.0; }
double depth_from_gamma(double gamma) { return 8.0 * gamma / (pi * pi); }

SimParams to_dimensionless(const PhysicalParams& p) {
  p.validate();
  SimParams sim;
  sim.time_unit = p.atom_mass * p.lattice_spacing * p.lattice_spacing / (16.0 * constants::hbar);
  sim.length_unit = p.lattice_spacing / 4.0;
  sim.gamma = gamma_from_depth(p.depth_s);
  sim.omega_ext = p.trap_omega * sim.time_unit;
  sim.beta = p.beta;
  return sim;
}

PhysicalParams from_dimensionless(const SimParams& sim, double tof_time) {
  if (!(sim.time_unit > 0.0) || !(sim.length_unit > 0.0))
    throw ParameterError("time and length units must be positive");
  PhysicalParams p;
  p.lattice_spacing = 4.0 * sim.length_unit;
  p.atom_mass = 16.0 * constants::hbar * sim.time_unit / (p.lattice_spacing * p.lattice_spacing);
  p.depth_s = depth_from_gamma(sim.gamma);
  p.trap_omega = sim.omega_ext / sim.time_unit;
  p.beta = sim.beta;
  p.tof_time = tof_time;
  p.validate();
  return p;
}

double theta_to_displacement(double theta0, double lattice_spacing) {
  if (!(theta0 >= 0.0 && theta0 <= pi))
    throw ParameterError("theta0 must lie in [0, pi], got " + std::to_string(theta0));
  return theta0 * lattice_spacing / pi;
}

double tof_fringe_spacing(const PhysicalParams& p) {
  p.validate();
  return constants::planck * p.tof_time / (p.atom_mass * p.lattice_spacing);
}

double deg_to_rad(double deg) { return deg * pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / pi; }

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

double PhaseSchedule::amplitude(double t) const {
  if (ramp_duration <= 0.0) return gamma;
  return gamma * smoothstep((t - ramp_start) / ramp_duration);
}

}  // namespace tunnel
