#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace tunnel {

/// Complete elliptic integral of the first kind K(k) with modulus k, by the
/// arithmetic-geometric mean.
double elliptic_k(double k);

/// Small-oscillation frequency at the bottom of a lattice well, pi^2 sqrt(s) / 8.
double well_frequency(double depth_s);

/// Pendulum period 4 K(sin theta0) / omega0 of a particle released at rest a
/// phase theta0 away from the well minimum. Requires 0 < theta0 < pi/2.
double classical_period(double depth_s, double theta0);

struct ClassicalState {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double energy = 0.0;
};

struct ClassicalTrajectory {
  std::vector<ClassicalState> states;  // every `stride`-th step
  double period = 0.0;
  double max_energy_error = 0.0;  // max |E(t) - E(0)| / |E(0)|
};

/// Velocity-Verlet in V = -gamma cos^2(pi X / 4), starting at rest at
/// X0 = 4 theta0 / pi. Integrates until two successive downward crossings
/// of X = 0 (located by cubic Hermite interpolation) give one period.
/// Throws NumericalError if no period completes within 10 harmonic periods.
ClassicalTrajectory classical_trajectory(double depth_s, double theta0, double dt, std::size_t stride = 1);

/// Verlet step whose relative energy error stays near energy_tol for this
/// orbit, and never coarser than 20000 steps per harmonic period.
double classical_time_step(double depth_s, double theta0, double energy_tol = 1e-9);

struct ClassicalPoint {
  double axis = 0.0;
  double period = 0.0;
};
/// CSV with header `<axis_name>,period,sigma` (sigma is zero for the closed form).
void write_classical_csv(std::ostream& out, const char* axis_name, const std::vector<ClassicalPoint>& points);

}  // namespace tunnel
