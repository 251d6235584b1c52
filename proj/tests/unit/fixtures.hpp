#pragma once

#include "tunnel/propagator.hpp"

namespace fixtures {

inline const tunnel::Grid kGrid(4096, 256.0);
// Dipole period at s = 3.21 from the band-0/band-2 gap at q = 0.
inline constexpr double kFlagshipPeriod = 4.357;

inline tunnel::SimParams flagship(double beta = 1.0) {
  tunnel::SimParams sim;
  sim.gamma = tunnel::gamma_from_depth(3.21);
  sim.omega_ext = 1.0 / 262.0;
  sim.beta = beta;
  sim.time_unit = 1.44316060e-25 * 532e-9 * 532e-9 / (16.0 * 1.054571817e-34);
  sim.length_unit = 133e-9;
  return sim;
}

inline const tunnel::Field& flagship_ground_state() {
  static const tunnel::Field psi = tunnel::ground_state(kGrid, flagship()).psi;
  return psi;
}

}  // namespace fixtures
