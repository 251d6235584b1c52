#include "tunnel/classical.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "tunnel/errors.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

using std::numbers::pi;

double elliptic_k(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw ParameterError("elliptic modulus must lie in [0, 1)");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return pi / (2.0 * a);
}

double well_frequency(double depth_s) {
  if (!(depth_s > 0.0)) throw ParameterError("lattice depth must be positive");
  return pi * pi * std::sqrt(depth_s) / 8.0;
}

double classical_period(double depth_s, double theta0) {
  if (!(theta0 > 0.0 && theta0 < pi / 2.0))
    throw ParameterError("theta0 must lie in (0, 90) degrees for a librating orbit");
  return 4.0 * elliptic_k(std::sin(theta0)) / well_frequency(depth_s);
}

double classical_time_step(double depth_s, double theta0, double energy_tol) {
  if (!(energy_tol > 0.0)) throw ParameterError("energy tolerance must be positive");
  const double omega0 = well_frequency(depth_s);
  // Verlet's relative energy error in this well is close to (omega0 dt)^2 tan^2(theta0) / 4.
  const double dt = 2.0 * std::sqrt(energy_tol) / (omega0 * std::tan(theta0));
  return std::min(dt, 2.0 * pi / omega0 / 20000.0);
}

namespace {

struct Lattice {
  double gamma;
  double potential(double x) const {
    const double c = std::cos(pi * x / 4.0);
    return -gamma * c * c;
  }
  double force(double x) const { return -gamma * pi / 4.0 * std::sin(pi * x / 2.0); }
  double energy(double x, double p) const { return 0.5 * p * p + potential(x); }
};

// Root of the cubic Hermite interpolant of x(t) on [0, h] with end slopes p0, p1.
double hermite_root(double x0, double p0, double x1, double p1, double h) {
  auto value = [&](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * p0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * p1;
  };
  double lo = 0.0, hi = 1.0;
  const bool rising = x1 > x0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((value(mid) < 0.0) == rising) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi) * h;
}

}  // namespace

ClassicalTrajectory classical_trajectory(double depth_s, double theta0, double dt, std::size_t stride) {
  if (!(theta0 > 0.0 && theta0 < pi / 2.0))
    throw ParameterError("theta0 must lie in (0, 90) degrees for a librating orbit");
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (stride == 0) throw ParameterError("stride must be positive");

  const Lattice lattice{gamma_from_depth(depth_s)};
  const double t_limit = 10.0 * 2.0 * pi / well_frequency(depth_s);
  double x = 4.0 * theta0 / pi, p = 0.0, t = 0.0;
  const double e0 = lattice.energy(x, p);

  ClassicalTrajectory out;
  out.states.push_back({t, x, p, e0});
  double force = lattice.force(x);
  double first_crossing = -1.0;
  std::size_t step = 0;
  while (t < t_limit) {
    const double x_prev = x, p_prev = p;
    p += 0.5 * dt * force;
    x += dt * p;
    force = lattice.force(x);
    p += 0.5 * dt * force;
    t += dt;
    ++step;

    const double e = lattice.energy(x, p);
    out.max_energy_error = std::max(out.max_energy_error, std::abs(e - e0) / std::abs(e0));
    if (step % stride == 0) out.states.push_back({t, x, p, e});

    if (x_prev > 0.0 && x <= 0.0) {
      const double crossing = t - dt + hermite_root(x_prev, p_prev, x, p, dt);
      if (first_crossing < 0.0) {
        first_crossing = crossing;
      } else {
        out.period = crossing - first_crossing;
        if (step % stride != 0) out.states.push_back({t, x, p, e});
        return out;
      }
    }
  }
  throw NumericalError("classical orbit did not return within 10 harmonic periods (theta0 = " +
                       std::to_string(theta0) + " rad, s = " + std::to_string(depth_s) + ")");
}

void write_classical_csv(std::ostream& out, const char* axis_name, const std::vector<ClassicalPoint>& points) {
  out << axis_name << ",period,sigma\n" << std::setprecision(17);
  for (const auto& pt : points) out << pt.axis << ',' << pt.period << ",0\n";
}

}  // namespace tunnel
