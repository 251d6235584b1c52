#include "tunnel/observables.hpp"

#include <cmath>
#include <numeric>

namespace tunnel {

double OrderPopulations::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double MomentumSnapshot::total() const {
  return std::accumulate(density.begin(), density.end(), 0.0) * dk;
}

double MomentumSnapshot::mean_k() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) sum += k[i] * density[i];
  return sum * dk;
}

double MomentumSnapshot::mean_k2() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) sum += k[i] * k[i] * density[i];
  return sum * dk;
}

MomentumSnapshot momentum_density(const Field& psi, double hold_time, double window) {
  const Grid& g = psi.grid();
  const auto amps = spectral_amplitudes(psi);
  const std::size_t n = g.size();
  MomentumSnapshot snap;
  snap.hold_time = hold_time;
  snap.dk = g.dk();
  snap.k.resize(n);
  snap.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + n / 2) % n;  // ascending wavenumber
    snap.k[i] = g.k(j);
    snap.density[i] = std::norm(amps[j]);
  }
  snap.populations = peak_populations(snap, window);
  snap.peak_fits = fit_order_peaks(snap, window);
  return snap;
}

OrderPopulations peak_populations(const MomentumSnapshot& snapshot, double window) {
  if (!(window > 0.0)) throw ParameterError("population window must be positive");
  if (window > kDefaultOrderWindow * (1.0 + 1e-12))
    throw ParameterError("population windows overlap for half-width > pi/4");
  const double eps = 1e-9 * snapshot.dk;
  OrderPopulations pops;
  for (int n = -OrderPopulations::kMaxOrder; n <= OrderPopulations::kMaxOrder; ++n) {
    const double lo = order_wavenumber(n) - window - eps;
    const double hi = order_wavenumber(n) + window - eps;
    double sum = 0.0;
    for (std::size_t i = 0; i < snapshot.k.size(); ++i)
      if (snapshot.k[i] >= lo && snapshot.k[i] < hi) sum += snapshot.density[i];
    pops(n) = sum * snapshot.dk;
  }
  return pops;
}

std::vector<PeakFit> fit_order_peaks(const MomentumSnapshot& snapshot, double window) {
  std::vector<PeakFit> fits;
  for (int n = -OrderPopulations::kMaxOrder; n <= OrderPopulations::kMaxOrder; ++n) {
    if (snapshot.populations(n) < 1e-3) continue;
    const double c = order_wavenumber(n);
    const auto fit = fit_peak_near_max(snapshot.k, snapshot.density, c - window, c + window, 0.5);
    if (fit) fits.push_back({n, fit->center, fit->width, fit->amplitude});
  }
  return fits;
}

double expectation_x(const Field& psi) {
  const Grid& g = psi.grid();
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) sum += g.x(j) * std::norm(psi[j]);
  return sum * g.dx() / psi.norm_squared();
}

namespace {
template <typename F>
double spectral_moment(const Field& psi, F weight) {
  const Grid& g = psi.grid();
  const auto amps = spectral_amplitudes(psi);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double d = std::norm(amps[j]);
    num += weight(g.k(j)) * d;
    den += d;
  }
  return num / den;
}
}  // namespace

double expectation_p(const Field& psi) {
  return spectral_moment(psi, [](double k) { return k; });
}

double kinetic_energy(const Field& psi) {
  return spectral_moment(psi, [](double k) { return 0.5 * k * k; });
}

double total_energy(const Field& psi, std::span<const double> potential, double beta) {
  const Grid& g = psi.grid();
  if (potential.size() != g.size()) throw ParameterError("potential size does not match grid");
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double rho = std::norm(psi[j]);
    sum += (potential[j] + 0.5 * beta * rho) * rho;
  }
  return kinetic_energy(psi) + sum * g.dx() / psi.norm_squared();
}

double tof_position(double k_dimensionless, const PhysicalParams& p) {
  p.validate();
  const double k_physical = k_dimensionless / (p.lattice_spacing / 4.0);
  return constants::hbar * k_physical * p.tof_time / p.atom_mass;
}

std::vector<double> tof_map(const MomentumSnapshot& snapshot, const PhysicalParams& p) {
  std::vector<double> out(snapshot.k.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tof_position(snapshot.k[i], p);
  return out;
}

}  // namespace tunnel
