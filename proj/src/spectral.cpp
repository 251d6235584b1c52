#include "tunnel/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace tunnel {

namespace {
// The FFTW planner is not thread-safe; execution with new-array is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

struct SpectralTransform::Plans {
  std::size_t n = 0;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SpectralTransform::SpectralTransform(std::size_t n) : plans_(std::make_unique<Plans>()) {
  if (n == 0) throw std::invalid_argument("transform length must be positive");
  plans_->n = n;
  std::vector<Complex> scratch(n);
  std::lock_guard lock(planner_mutex());
  // UNALIGNED: plans are executed on arbitrary std::vector buffers.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int len = static_cast<int>(n);
  plans_->fwd = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  if (!plans_->fwd || !plans_->bwd) throw std::runtime_error("FFTW plan creation failed");
}

SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

std::size_t SpectralTransform::size() const { return plans_->n; }

const SpectralTransform& shared_transform(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, std::unique_ptr<SpectralTransform>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SpectralTransform>(n);
  return *slot;
}

void SpectralTransform::forward(std::span<Complex> data) const {
  if (data.size() != plans_->n) throw std::invalid_argument("transform length mismatch");
  fftw_execute_dft(plans_->fwd, as_fftw(data.data()), as_fftw(data.data()));
}

void SpectralTransform::backward(std::span<Complex> data) const {
  if (data.size() != plans_->n) throw std::invalid_argument("transform length mismatch");
  fftw_execute_dft(plans_->bwd, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace tunnel
