#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tunnel/field.hpp"
#include "tunnel/observables.hpp"
#include "tunnel/potential.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

enum class TimeMode { real, imaginary };

inline constexpr double kDefaultTimeStep = 5e-3;

/// Second-order Strang splitting for
///   i dpsi/dt = [-Laplacian/2 + V(X) + beta |psi|^2] psi
/// as half kinetic (spectral), full potential plus nonlinear (pointwise,
/// density frozen at the start of the substep), half kinetic.
/// Imaginary mode renormalizes to unit norm after every step.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Grid& grid, double beta, double dt, TimeMode mode);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  TimeMode mode() const { return mode_; }
  double beta() const { return beta_; }
  std::size_t steps_taken() const { return steps_; }

  /// Negative dt runs real-time evolution backwards.
  void set_dt(double dt);
  void set_potential(const Potential& v);
  /// Cheaper update when only the lattice amplitude changes.
  void set_lattice_amplitude(double gamma);
  const Potential& potential() const { return potential_; }
  const std::vector<double>& potential_samples() const { return v_samples_; }

  /// Throws NumericalError with the step index on non-finite values.
  void step(Field& psi);

 private:
  void rebuild_kinetic();
  void resample();

  Grid grid_;
  double beta_;
  double dt_;
  TimeMode mode_;
  Potential potential_;
  std::vector<double> trap_;
  std::vector<double> lattice_;  // cos^2(pi X/4 + theta)
  std::vector<double> v_samples_;
  std::vector<Complex> kinetic_half_;
  std::vector<Complex> buffer_;
  std::size_t steps_ = 0;
};

/// One step of the propagator with a fixed potential; convenience wrapper.
void step(Field& psi, const Potential& v, double beta, double dt, TimeMode mode);

struct EvolutionSpec {
  double dt = kDefaultTimeStep;
  double t_end = 0.0;
  PhaseSchedule schedule;
  TimeMode mode = TimeMode::real;
  std::vector<double> snapshot_times;

  void validate() const;
};

using FieldObserver = std::function<void(double t, const Field& psi)>;

/// Evolves psi from t = 0 to spec.t_end under the time-dependent potential
/// (amplitude and phase from spec.schedule, evaluated at step midpoints).
/// Each interval between snapshot times is covered by an integer number of
/// equal steps no longer than spec.dt, so snapshots land exactly on the
/// requested times. The observer is called at every snapshot time.
void evolve(Field& psi, const EvolutionSpec& spec, double omega_ext, double beta, const FieldObserver& observer);

struct GroundStateOptions {
  double tol = 1e-10;  // per-step energy change
  std::vector<double> dt_ladder{0.1, 0.02, kDefaultTimeStep};
  std::size_t max_steps = 500000;  // per ladder stage
  std::size_t check_interval = 20;
  double theta = 0.0;
};

struct GroundStateResult {
  Field psi;
  double energy = 0.0;
  double last_slope = 0.0;
  std::size_t steps = 0;
};

/// Imaginary-time relaxation from a Gaussian seed of width 1/sqrt(omega_ext)
/// through the dt ladder. Each stage stops once the energy change per step
/// falls below tol; a stage that exhausts max_steps throws NumericalError.
GroundStateResult ground_state(const Grid& grid, const SimParams& sim, const GroundStateOptions& options = {});

/// Sudden lattice shift: theta jumps to theta0 at t = 0 (the field is not
/// touched), then real-time evolution with momentum snapshots at the
/// requested times.
std::vector<MomentumSnapshot> quench_and_evolve(const Field& psi0, double theta0, const SimParams& sim,
                                                EvolutionSpec spec);

/// Loads the lattice by ramping gamma from 0 with the smoothstep profile,
/// starting from the trap-only ground state.
Field adiabatic_load(const Grid& grid, const SimParams& sim, double ramp_duration, double dt = kDefaultTimeStep,
                     const GroundStateOptions& options = {});

}  // namespace tunnel
