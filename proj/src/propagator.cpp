#include "tunnel/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tunnel/errors.hpp"

namespace tunnel {

SplitStepPropagator::SplitStepPropagator(const Grid& grid, double beta, double dt, TimeMode mode)
    : grid_(grid), beta_(beta), dt_(dt), mode_(mode), buffer_(grid.size()) {
  if (!(beta >= 0.0)) throw ParameterError("beta must be non-negative");
  if (dt == 0.0 || !std::isfinite(dt)) throw ParameterError("time step must be finite and non-zero");
  if (mode == TimeMode::imaginary && dt < 0.0) throw ParameterError("imaginary-time step must be positive");
  rebuild_kinetic();
  set_potential(Potential{});
}

void SplitStepPropagator::set_dt(double dt) {
  if (dt == dt_) return;
  if (dt == 0.0 || !std::isfinite(dt)) throw ParameterError("time step must be finite and non-zero");
  if (mode_ == TimeMode::imaginary && dt < 0.0) throw ParameterError("imaginary-time step must be positive");
  dt_ = dt;
  rebuild_kinetic();
}

void SplitStepPropagator::rebuild_kinetic() {
  const std::size_t n = grid_.size();
  kinetic_half_.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);  // folds in the backward-FFT scaling
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid_.k(j);
    const double arg = 0.5 * k * k * 0.5 * dt_;
    kinetic_half_[j] = mode_ == TimeMode::real ? inv_n * Complex(std::cos(arg), -std::sin(arg))
                                               : Complex(inv_n * std::exp(-arg), 0.0);
  }
}

void SplitStepPropagator::set_potential(const Potential& v) {
  const bool reshape = trap_.empty() || v.theta != potential_.theta || v.omega_ext != potential_.omega_ext;
  potential_ = v;
  if (reshape) {
    const std::size_t n = grid_.size();
    trap_.resize(n);
    lattice_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      trap_[j] = potential_.trap(grid_.x(j));
      lattice_[j] = Potential::lattice_shape(grid_.x(j), potential_.theta);
    }
  }
  resample();
}

void SplitStepPropagator::set_lattice_amplitude(double gamma) {
  if (gamma == potential_.gamma) return;
  potential_.gamma = gamma;
  resample();
}

void SplitStepPropagator::resample() {
  v_samples_.resize(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) v_samples_[j] = trap_[j] - potential_.gamma * lattice_[j];
}

void SplitStepPropagator::step(Field& psi) {
  if (!(psi.grid() == grid_)) throw ParameterError("field grid does not match propagator grid");
  const auto& fft = shared_transform(grid_.size());
  auto amps = psi.amplitudes();
  const std::size_t n = amps.size();

  auto half_kinetic = [&] {
    fft.forward(amps);
    for (std::size_t j = 0; j < n; ++j) amps[j] *= kinetic_half_[j];
    fft.backward(amps);
  };

  half_kinetic();
  if (mode_ == TimeMode::real) {
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = (v_samples_[j] + beta_ * std::norm(amps[j])) * dt_;
      amps[j] *= Complex(std::cos(arg), -std::sin(arg));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) amps[j] *= std::exp(-(v_samples_[j] + beta_ * std::norm(amps[j])) * dt_);
  }
  half_kinetic();
  ++steps_;

  const double norm2 = psi.norm_squared();
  if (!std::isfinite(norm2) || norm2 == 0.0)
    throw NumericalError("non-finite wavefunction at step " + std::to_string(steps_) +
                         " (dt = " + std::to_string(dt_) + ")");
  if (mode_ == TimeMode::imaginary) {
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= scale;
  }
}

void step(Field& psi, const Potential& v, double beta, double dt, TimeMode mode) {
  SplitStepPropagator prop(psi.grid(), beta, dt, mode);
  prop.set_potential(v);
  prop.step(psi);
}

void EvolutionSpec::validate() const {
  if (!(dt > 0.0)) throw ParameterError("evolution dt must be positive");
  if (!(t_end >= 0.0)) throw ParameterError("evolution t_end must be non-negative");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ParameterError("snapshot times must be sorted");
  for (double t : snapshot_times)
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) throw ParameterError("snapshot time outside [0, t_end]");
}

void evolve(Field& psi, const EvolutionSpec& spec, double omega_ext, double beta, const FieldObserver& observer) {
  spec.validate();
  std::vector<double> marks{0.0};
  marks.insert(marks.end(), spec.snapshot_times.begin(), spec.snapshot_times.end());
  marks.push_back(spec.t_end);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  auto wants_snapshot = [&](double t) {
    return std::binary_search(spec.snapshot_times.begin(), spec.snapshot_times.end(), t);
  };

  SplitStepPropagator prop(psi.grid(), beta, spec.dt, spec.mode);
  const auto& sched = spec.schedule;
  prop.set_potential(Potential{sched.amplitude(0.0), sched.theta(0.0), omega_ext});

  if (observer && wants_snapshot(0.0)) observer(0.0, psi);
  for (std::size_t s = 0; s + 1 < marks.size(); ++s) {
    const double a = marks[s], b = marks[s + 1];
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / spec.dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    prop.set_dt(h);
    for (std::size_t i = 0; i < steps; ++i) {
      const double t_mid = a + (static_cast<double>(i) + 0.5) * h;
      const double theta = sched.theta(t_mid);
      if (theta != prop.potential().theta)
        prop.set_potential(Potential{sched.amplitude(t_mid), theta, omega_ext});
      else
        prop.set_lattice_amplitude(sched.amplitude(t_mid));
      prop.step(psi);
    }
    if (observer && wants_snapshot(b)) observer(b, psi);
  }
}

namespace {
Field gaussian_seed(const Grid& grid, double omega_ext) {
  const double width = omega_ext > 0.0 ? 1.0 / std::sqrt(omega_ext) : grid.length() / 8.0;
  auto psi = Field::from_function(grid, [width](double x) { return Complex(std::exp(-0.5 * x * x / (width * width)), 0.0); });
  psi.normalize();
  return psi;
}
}  // namespace

GroundStateResult ground_state(const Grid& grid, const SimParams& sim, const GroundStateOptions& options) {
  if (!(options.tol > 0.0)) throw ParameterError("ground-state tolerance must be positive");
  if (options.dt_ladder.empty()) throw ParameterError("ground-state dt ladder is empty");
  if (options.check_interval == 0) throw ParameterError("check interval must be positive");

  GroundStateResult result{gaussian_seed(grid, sim.omega_ext)};
  const Potential v{sim.gamma, options.theta, sim.omega_ext};
  for (double dt : options.dt_ladder) {
    SplitStepPropagator prop(grid, sim.beta, dt, TimeMode::imaginary);
    prop.set_potential(v);
    double e_prev = total_energy(result.psi, prop.potential_samples(), sim.beta);
    bool converged = false;
    std::size_t taken = 0;
    while (taken < options.max_steps) {
      for (std::size_t i = 0; i < options.check_interval; ++i) prop.step(result.psi);
      taken += options.check_interval;
      const double e = total_energy(result.psi, prop.potential_samples(), sim.beta);
      result.last_slope = (e - e_prev) / static_cast<double>(options.check_interval);
      e_prev = e;
      if (std::abs(result.last_slope) < options.tol) {
        converged = true;
        break;
      }
    }
    result.steps += taken;
    result.energy = e_prev;
    if (!converged)
      throw NumericalError("ground state did not converge at dt = " + std::to_string(dt) + " after " +
                           std::to_string(taken) + " steps; last energy slope " + std::to_string(result.last_slope));
  }
  return result;
}

std::vector<MomentumSnapshot> quench_and_evolve(const Field& psi0, double theta0, const SimParams& sim,
                                                EvolutionSpec spec) {
  spec.mode = TimeMode::real;
  spec.schedule = PhaseSchedule{};
  spec.schedule.gamma = sim.gamma;
  spec.schedule.theta0 = theta0;
  spec.schedule.quench_time = 0.0;

  std::vector<MomentumSnapshot> out;
  out.reserve(spec.snapshot_times.size());
  Field psi = psi0;
  evolve(psi, spec, sim.omega_ext, sim.beta, [&](double t, const Field& f) { out.push_back(momentum_density(f, t)); });
  return out;
}

Field adiabatic_load(const Grid& grid, const SimParams& sim, double ramp_duration, double dt,
                     const GroundStateOptions& options) {
  if (!(ramp_duration >= 0.0)) throw ParameterError("ramp duration must be non-negative");
  SimParams trap_only = sim;
  trap_only.gamma = 0.0;
  Field psi = ground_state(grid, trap_only, options).psi;
  if (ramp_duration == 0.0) return psi;

  EvolutionSpec spec;
  spec.dt = dt;
  spec.t_end = ramp_duration;
  spec.mode = TimeMode::real;
  spec.schedule.gamma = sim.gamma;
  spec.schedule.ramp_duration = ramp_duration;
  spec.schedule.quench_time = std::numeric_limits<double>::infinity();
  evolve(psi, spec, sim.omega_ext, sim.beta, nullptr);
  return psi;
}

}  // namespace tunnel
