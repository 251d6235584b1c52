#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace tunnel {

using Complex = std::complex<double>;

/// In-place complex FFT pair of fixed length. Plans are created with
/// FFTW_ESTIMATE so that results are bitwise reproducible run to run.
/// The backward transform is unnormalized; callers scale by 1/n.
class SpectralTransform {
 public:
  explicit SpectralTransform(std::size_t n);
  ~SpectralTransform();
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  std::size_t size() const;
  void forward(std::span<Complex> data) const;
  void backward(std::span<Complex> data) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Process-wide transform of length n, created on first use.
const SpectralTransform& shared_transform(std::size_t n);

}  // namespace tunnel
