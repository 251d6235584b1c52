#include "tunnel/bands.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "tunnel/errors.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

namespace {

constexpr double kZoneEdge = std::numbers::pi / 4.0;
constexpr double kCompletenessAbort = 1e-3;

void check_plane_waves(std::size_t n_pw) {
  if (n_pw < 3 || n_pw % 2 == 0) throw ParameterError("plane-wave count must be odd and at least 3");
}

Eigen::MatrixXd bloch_hamiltonian(double gamma, double q, std::size_t n_pw) {
  const auto n = static_cast<Eigen::Index>(n_pw);
  const Eigen::Index half = n / 2;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = q + static_cast<double>(i - half) * kReciprocalVector;
    h(i, i) = 0.5 * k * k - 0.5 * gamma;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -0.25 * gamma;
  }
  return h;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(double gamma, double q, std::size_t n_pw, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bloch_hamiltonian(gamma, q, n_pw),
                                                    vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("Bloch eigensolve failed for gamma = " + std::to_string(gamma) + ", q = " + std::to_string(q));
  return es;
}

}  // namespace

double BandSet::band_average(std::size_t b) const {
  return energies.col(static_cast<Eigen::Index>(b)).mean();
}

BandSet bloch_bands_at(double gamma, std::vector<double> q, std::size_t n_pw) {
  check_plane_waves(n_pw);
  if (q.empty()) throw ParameterError("quasimomentum mesh is empty");
  if (gamma < 0.0) throw ParameterError("lattice amplitude must be non-negative");
  BandSet out;
  out.gamma = gamma;
  out.n_pw = n_pw;
  out.q = std::move(q);
  out.energies.resize(static_cast<Eigen::Index>(out.q.size()), static_cast<Eigen::Index>(n_pw));
  out.vectors.reserve(out.q.size());
  for (std::size_t i = 0; i < out.q.size(); ++i) {
    const auto es = solve(gamma, out.q[i], n_pw, true);
    out.energies.row(static_cast<Eigen::Index>(i)) = es.eigenvalues().transpose();
    out.vectors.push_back(es.eigenvectors());
  }
  return out;
}

BandSet bloch_bands(double gamma, std::size_t n_q, std::size_t n_pw) {
  if (n_q == 0) throw ParameterError("need at least one quasimomentum");
  std::vector<double> q(n_q);
  const double step = 2.0 * kZoneEdge / static_cast<double>(n_q);
  for (std::size_t i = 0; i < n_q; ++i) q[i] = -kZoneEdge + step * static_cast<double>(i + 1);
  // Snap the exact centre so that q = 0 is represented without rounding.
  if (n_q % 2 == 0) q[n_q / 2 - 1] = 0.0;
  return bloch_bands_at(gamma, std::move(q), n_pw);
}

Eigen::VectorXd bloch_energies(double gamma, double q, std::size_t n_pw) {
  check_plane_waves(n_pw);
  return solve(gamma, q, n_pw, false).eigenvalues();
}

std::size_t count_bound_states(const BandSet& bands) {
  std::size_t count = 0;
  while (count < bands.band_count() && bands.band_average(count) < BandSet::barrier_top) ++count;
  return count;
}

EffectiveMass effective_mass(const BandSet& bands, double omega_ext, double h) {
  const double e_minus = bloch_energies(bands.gamma, -h, bands.n_pw)(0);
  const double e_zero = bloch_energies(bands.gamma, 0.0, bands.n_pw)(0);
  const double e_plus = bloch_energies(bands.gamma, h, bands.n_pw)(0);
  const double curvature = (e_plus - 2.0 * e_zero + e_minus) / (h * h);
  if (!(curvature > 0.0))
    throw NumericalError("lowest band has non-positive curvature at q = 0 (gamma = " + std::to_string(bands.gamma) + ")");
  EffectiveMass out;
  out.mass_ratio = 1.0 / curvature;
  out.omega_dip = omega_ext / std::sqrt(out.mass_ratio);
  return out;
}

BandProjection project_onto_bands(const Field& psi, double gamma, double theta, std::size_t n_pw) {
  check_plane_waves(n_pw);
  const Grid& grid = psi.grid();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const auto stride = static_cast<std::ptrdiff_t>(grid.length() / kLatticePeriod);  // G / dK
  const std::ptrdiff_t half_pw = static_cast<std::ptrdiff_t>(n_pw / 2);

  // Grid quasimomenta j dK inside the Brillouin zone (-pi/4, pi/4].
  std::vector<double> q_mesh;
  std::vector<std::ptrdiff_t> q_index;
  for (std::ptrdiff_t j = -((stride - 1) / 2); j <= stride / 2; ++j) {
    q_mesh.push_back(static_cast<double>(j) * grid.dk());
    q_index.push_back(j);
  }
  const BandSet bands = bloch_bands_at(gamma, q_mesh, n_pw);

  const auto amplitudes = spectral_amplitudes(psi);
  const double norm = psi.norm_squared();
  if (!(norm > 0.0)) throw NumericalError("cannot project a zero field onto Bloch states");

  BandProjection out;
  out.gamma = gamma;
  out.theta = theta;
  out.band_populations.assign(n_pw, 0.0);
  Eigen::VectorXcd c(static_cast<Eigen::Index>(n_pw));
  for (std::size_t iq = 0; iq < q_mesh.size(); ++iq) {
    for (std::ptrdiff_t m = -half_pw; m <= half_pw; ++m) {
      const std::ptrdiff_t j = q_index[iq] + m * stride;  // signed grid index of K = q + m G
      Complex value{};
      if (j > -n / 2 && j < n / 2) {
        const std::ptrdiff_t fft_index = j >= 0 ? j : j + n;
        value = amplitudes[static_cast<std::size_t>(fft_index)] * std::polar(1.0, -2.0 * static_cast<double>(m) * theta);
      }
      c(static_cast<Eigen::Index>(m + half_pw)) = value;
    }
    const Eigen::VectorXcd overlaps = bands.vectors[iq].transpose().cast<Complex>() * c;
    for (std::size_t b = 0; b < n_pw; ++b) {
      const double pop = std::norm(overlaps(static_cast<Eigen::Index>(b))) * grid.dk() / norm;
      out.band_populations[b] += pop;
      if (bands.energies(static_cast<Eigen::Index>(iq), static_cast<Eigen::Index>(b)) < bands.barrier_top)
        out.energy_cut_fraction += pop;
    }
  }

  out.bound_bands = count_bound_states(bands);
  for (std::size_t b = 0; b < n_pw; ++b) {
    out.completeness += out.band_populations[b];
    if (b < out.bound_bands) out.bound_fraction += out.band_populations[b];
  }
  if (std::abs(out.completeness - 1.0) > kCompletenessAbort)
    throw NumericalError("Bloch basis incomplete: populations sum to " + std::to_string(out.completeness) +
                         " with " + std::to_string(n_pw) + " plane waves");
  return out;
}

double bound_fraction(const Field& psi, double gamma, double theta, std::size_t n_pw) {
  return project_onto_bands(psi, gamma, theta, n_pw).bound_fraction;
}

void write_bands_csv(std::ostream& out, const BandSet& bands, std::size_t max_bands) {
  const std::size_t nb = std::min(max_bands, bands.band_count());
  out << "q";
  for (std::size_t b = 0; b < nb; ++b) out << ",E" << b;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < bands.q.size(); ++i) {
    out << bands.q[i];
    for (std::size_t b = 0; b < nb; ++b)
      out << ',' << bands.energies(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
    out << '\n';
  }
}

nlohmann::json projection_json(const BandProjection& p) {
  return {{"gamma", p.gamma},
          {"theta", p.theta},
          {"band_populations", p.band_populations},
          {"bound_bands", p.bound_bands},
          {"bound_fraction", p.bound_fraction},
          {"unbound_fraction", 1.0 - p.bound_fraction},
          {"energy_cut_unbound_fraction", 1.0 - p.energy_cut_fraction},
          {"completeness", p.completeness}};
}

}  // namespace tunnel
