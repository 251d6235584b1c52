#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <json.hpp>
#include <numbers>
#include <vector>

#include "tunnel/field.hpp"

namespace tunnel {

/// Reciprocal lattice vector of the period-4 lattice.
inline constexpr double kReciprocalVector = std::numbers::pi / 2.0;
inline constexpr std::size_t kDefaultPlaneWaves = 41;

/// Bloch spectrum of -gamma cos^2(pi X / 4) in the plane-wave basis
/// e^{i (q + m G) X}, m = -M..M. Eigenvectors are for theta = 0; a shifted
/// lattice has v_m(theta) = e^{2 i m theta} v_m(0).
struct BandSet {
  static constexpr double barrier_top = 0.0;

  double gamma = 0.0;
  std::size_t n_pw = 0;
  std::vector<double> q;                 // ascending, inside (-pi/4, pi/4]
  Eigen::MatrixXd energies;              // energies(iq, b), ascending in b
  std::vector<Eigen::MatrixXd> vectors;  // vectors[iq].col(b), rows m = -M..M

  std::size_t band_count() const { return n_pw; }
  /// Energy of band b averaged over the q mesh.
  double band_average(std::size_t b) const;
};

/// n_q quasimomenta evenly spaced in (-pi/4, pi/4]; includes q = 0 for even n_q.
BandSet bloch_bands(double gamma, std::size_t n_q, std::size_t n_pw = kDefaultPlaneWaves);
BandSet bloch_bands_at(double gamma, std::vector<double> q, std::size_t n_pw = kDefaultPlaneWaves);
/// Eigenvalues only, ascending.
Eigen::VectorXd bloch_energies(double gamma, double q, std::size_t n_pw = kDefaultPlaneWaves);

/// Bands whose q-averaged energy lies below the barrier top.
std::size_t count_bound_states(const BandSet& bands);

struct EffectiveMass {
  double mass_ratio = 1.0;  // m*/m
  double omega_dip = 0.0;   // (m/m*)^{1/2} omega_ext
};
/// Curvature of the lowest band at q = 0 by a central difference with step h.
/// Throws NumericalError for non-positive curvature.
EffectiveMass effective_mass(const BandSet& bands, double omega_ext, double h = 1e-3);

struct BandProjection {
  double gamma = 0.0;
  double theta = 0.0;
  std::vector<double> band_populations;
  std::size_t bound_bands = 0;
  double bound_fraction = 0.0;
  double energy_cut_fraction = 0.0;  // population of Bloch states with E(q) below the barrier top
  double completeness = 0.0;
};

/// Projects psi onto the Bloch states of the lattice shifted by theta (trap
/// ignored). The q mesh is the set of grid wavenumbers 2 pi j / L inside the
/// Brillouin zone, which makes the basis complete on the grid up to the
/// plane-wave cutoff. Populations are normalized by |psi|^2. Throws
/// NumericalError if completeness misses 1 by more than 1e-3.
BandProjection project_onto_bands(const Field& psi, double gamma, double theta,
                                  std::size_t n_pw = kDefaultPlaneWaves);
double bound_fraction(const Field& psi, double gamma, double theta, std::size_t n_pw = kDefaultPlaneWaves);

/// CSV with columns q, E0, ..., E{max_bands-1}.
void write_bands_csv(std::ostream& out, const BandSet& bands, std::size_t max_bands);
nlohmann::json projection_json(const BandProjection& projection);

}  // namespace tunnel
