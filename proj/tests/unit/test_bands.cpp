#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "tunnel/bands.hpp"
#include "tunnel/errors.hpp"

using namespace tunnel;
using std::numbers::pi;

namespace {
// Mathieu characteristic values for q_M = -s, mapped to E = pi^2 a / 32 - gamma / 2
// (independent of the plane-wave solver).
constexpr double kMathieuBandCentre[] = {-2.945486955121446, -1.0004649801934975, -0.06154622282333988};
constexpr double kMathieuBand0Edge = -2.9328785073249932;
constexpr double kMathieuBand1Edge = -1.2082346444610121;

const double kGamma = gamma_from_depth(3.21);
}  // namespace

TEST_CASE("free particle bands are folded parabolas") {
  const auto bands = bloch_bands(0.0, 32, 21);
  for (std::size_t i = 0; i < bands.q.size(); ++i) {
    std::vector<double> expected;
    for (int m = -10; m <= 10; ++m) expected.push_back(0.5 * std::pow(bands.q[i] + m * pi / 2, 2));
    std::sort(expected.begin(), expected.end());
    for (std::size_t b = 0; b < 21; ++b)
      CHECK(bands.energies(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) ==
            doctest::Approx(expected[b]).epsilon(1e-12));
  }
  CHECK(bloch_energies(0.0, 0.0, 21)(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(count_bound_states(bands) == 0);
}

TEST_CASE("s = 3.21 band energies match Mathieu characteristic values") {
  const auto centre = bloch_energies(kGamma, 0.0);
  for (int b = 0; b < 3; ++b) CHECK(std::abs(centre(b) - kMathieuBandCentre[b]) < 1e-10);
  const auto edge = bloch_energies(kGamma, pi / 4);
  CHECK(std::abs(edge(0) - kMathieuBand0Edge) < 1e-10);
  CHECK(std::abs(edge(1) - kMathieuBand1Edge) < 1e-10);
}

TEST_CASE("bound state counting") {
  CHECK(count_bound_states(bloch_bands(kGamma, 64)) == 2);
  CHECK(count_bound_states(bloch_bands(gamma_from_depth(20.0), 64)) >= 4);
}

TEST_CASE("deep lattice gap approaches the harmonic well frequency") {
  const double s = 20.0;
  const auto e = bloch_energies(gamma_from_depth(s), 0.0);
  const double omega0 = pi * pi * std::sqrt(s) / 8.0;
  CHECK(std::abs((e(1) - e(0)) - omega0) / omega0 < 0.10);
}

TEST_CASE("property: band ordering, symmetry and orthonormality") {
  const auto bands = bloch_bands(kGamma, 64);
  for (std::size_t i = 0; i < bands.q.size(); ++i) {
    const auto row = bands.energies.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index b = 0; b + 1 < row.size(); ++b) CHECK(row(b) <= row(b + 1));
    const auto& v = bands.vectors[i];
    const Eigen::MatrixXd gram = v.transpose() * v;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (double q : {0.05, 0.3, 0.7}) {
    const auto plus = bloch_energies(kGamma, q), minus = bloch_energies(kGamma, -q);
    CHECK((plus - minus).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("property: plane-wave truncation has converged at 21 waves") {
  for (double q : {0.0, 0.4, pi / 4}) {
    const auto small = bloch_energies(kGamma, q, 21), large = bloch_energies(kGamma, q, 41);
    for (int b = 0; b < 2; ++b) CHECK(std::abs(small(b) - large(b)) / std::abs(large(b)) < 1e-8);
  }
}

TEST_CASE("effective mass") {
  const double omega_ext = 1.0 / 262.0;
  CHECK(effective_mass(bloch_bands(0.0, 32), omega_ext).mass_ratio == doctest::Approx(1.0).epsilon(1e-6));
  double prev = 1.0;
  for (double s : {0.5, 1.0, 2.0, 3.21, 5.0, 8.0}) {
    const auto m = effective_mass(bloch_bands(gamma_from_depth(s), 32), omega_ext);
    CHECK(m.mass_ratio > prev);
    prev = m.mass_ratio;
  }
  const auto flagship = effective_mass(bloch_bands(kGamma, 32), omega_ext);
  CHECK(flagship.omega_dip < omega_ext);
  // The hydrodynamic dipole period is orders of magnitude longer than the micromotion period.
  CHECK(2.0 * pi / flagship.omega_dip > 100.0 * fixtures::kFlagshipPeriod);
}

TEST_CASE("band projection of the flagship ground state") {
  const auto& psi = fixtures::flagship_ground_state();
  const auto at_rest = project_onto_bands(psi, kGamma, 0.0);
  CHECK(at_rest.bound_bands == 2);
  CHECK(at_rest.bound_fraction > 0.99);
  CHECK(std::abs(at_rest.completeness - 1.0) < 1e-4);

  SUBCASE("small quench stays bound") {
    const auto p = project_onto_bands(psi, kGamma, 20.0 * pi / 180.0);
    CHECK(std::abs(p.completeness - 1.0) < 1e-4);
    CHECK(1.0 - p.bound_fraction <= 0.05);
  }
  SUBCASE("50 degree quench populates unbound bands") {
    const auto p = project_onto_bands(psi, kGamma, 50.0 * pi / 180.0);
    CHECK(std::abs(p.completeness - 1.0) < 1e-4);
    MESSAGE("unbound fraction at 50 deg: " << 1.0 - p.bound_fraction);
    CHECK(std::abs((1.0 - p.bound_fraction) - 0.35) <= 0.05);
    // band 2 dips below the barrier top near q = 0, so the energy cut keeps more
    CHECK(p.energy_cut_fraction >= p.bound_fraction);
    CHECK(1.0 - p.energy_cut_fraction < 0.1);
  }
  SUBCASE("unbound fraction grows with theta0") {
    double prev = 0.0;
    for (double deg : {10.0, 20.0, 30.0, 40.0, 50.0, 60.0}) {
      const double u = 1.0 - bound_fraction(psi, kGamma, deg * pi / 180.0);
      CHECK(u > prev);
      prev = u;
    }
  }
  SUBCASE("invariant under a global phase and a one-period translation") {
    const double theta = 0.6;
    const double ref = bound_fraction(psi, kGamma, theta);
    Field rotated = psi;
    for (auto& a : rotated.amplitudes()) a *= std::polar(1.0, 1.234);
    CHECK(bound_fraction(rotated, kGamma, theta) == doctest::Approx(ref).epsilon(1e-12));
    // shift by one lattice period: 4 / dx = 64 grid points
    Field shifted(psi.grid());
    const std::size_t n = psi.size(), s = 64;
    for (std::size_t j = 0; j < n; ++j) shifted[(j + s) % n] = psi[j];
    CHECK(bound_fraction(shifted, kGamma, theta + pi) == doctest::Approx(ref).epsilon(1e-10));
  }
  SUBCASE("truncated basis is rejected") {
    CHECK_THROWS_AS(project_onto_bands(psi, kGamma, 0.8, 3), NumericalError);
  }
}

TEST_CASE("band export") {
  std::ostringstream csv;
  write_bands_csv(csv, bloch_bands(kGamma, 4), 3);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "q,E0,E1,E2");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);

  BandProjection p;
  p.band_populations = {0.7, 0.2, 0.1};
  p.bound_bands = 2;
  p.bound_fraction = 0.9;
  p.energy_cut_fraction = 0.95;
  p.completeness = 1.0;
  const auto j = projection_json(p);
  CHECK(j["unbound_fraction"].get<double>() == doctest::Approx(0.1));
  CHECK(j["energy_cut_unbound_fraction"].get<double>() == doctest::Approx(0.05));
  CHECK(j["band_populations"].size() == 3);
}
