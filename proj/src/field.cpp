#include "tunnel/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tunnel/errors.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

Field::Field(Grid grid) : grid_(grid), psi_(grid.size()) {}

Field::Field(Grid grid, std::vector<Complex> amplitudes) : grid_(grid), psi_(std::move(amplitudes)) {
  if (psi_.size() != grid_.size()) throw ParameterError("amplitude count does not match grid size");
}

Field Field::from_function(const Grid& grid, const std::function<Complex(double)>& f) {
  Field out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) out.psi_[j] = f(grid.x(j));
  return out;
}

double Field::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : psi_) sum += std::norm(a);
  return sum * grid_.dx();
}

double Field::norm() const { return std::sqrt(norm_squared()); }

void Field::normalize() {
  const double n = norm();
  if (!std::isfinite(n) || n == 0.0)
    throw NumericalError("cannot normalize field with norm " + std::to_string(n));
  const double scale = 1.0 / n;
  for (auto& a : psi_) a *= scale;
}

Complex inner_product(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw ParameterError("inner product of fields on different grids");
  Complex sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::conj(a[j]) * b[j];
  return sum * a.grid().dx();
}

double fidelity(const Field& a, const Field& b) {
  return std::norm(inner_product(a, b)) / (a.norm_squared() * b.norm_squared());
}

std::vector<Complex> spectral_amplitudes(const Field& psi) {
  const Grid& g = psi.grid();
  std::vector<Complex> out(psi.amplitudes().begin(), psi.amplitudes().end());
  shared_transform(g.size()).forward(out);
  // The DFT is referenced to x_0 = -L/2; restore the e^{-i K x_0} phase.
  const double scale = g.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double phase = -g.k(j) * g.x0();
    out[j] *= scale * Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

Field field_from_spectral(const Grid& g, std::span<const Complex> spectral) {
  if (spectral.size() != g.size()) throw ParameterError("spectral size does not match grid");
  std::vector<Complex> data(spectral.begin(), spectral.end());
  const double scale = std::sqrt(2.0 * std::numbers::pi) / (g.dx() * static_cast<double>(g.size()));
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double phase = g.k(j) * g.x0();
    data[j] *= scale * Complex(std::cos(phase), std::sin(phase));
  }
  shared_transform(g.size()).backward(data);
  return Field(g, std::move(data));
}

}  // namespace tunnel
