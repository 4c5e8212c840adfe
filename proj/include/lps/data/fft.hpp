#pragma once

// Real-to-complex FFT of fixed length on top of FFTW. Plans use
// FFTW_ESTIMATE so results do not depend on planner timing.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace lps::data {

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), real_(n), spec_(n / 2 + 1) {
    if (n < 2) throw std::invalid_argument("RealFft: length must be at least 2");
    auto* c = reinterpret_cast<fftw_complex*>(spec_.data());
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_.data(), c, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real_.data(), FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("FFTW planning failed");
  }
  ~RealFft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }

  /// Unnormalized forward transform.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) {
    std::copy(in.begin(), in.end(), real_.begin());
    fftw_execute(fwd_);
    std::copy(spec_.begin(), spec_.end(), out.begin());
  }

  /// Inverse transform including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), spec_.begin());
    fftw_execute(inv_);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * s;
  }

 private:
  std::size_t n_;
  std::vector<double> real_;
  std::vector<std::complex<double>> spec_;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

/// Angular wavenumber of r2c mode m on a period L.
inline double wavenumber(std::size_t m, double L) { return 2.0 * std::numbers::pi * static_cast<double>(m) / L; }

/// True for the unpaired Nyquist mode of an even-length transform.
inline bool is_nyquist(std::size_t m, std::size_t n) { return n % 2 == 0 && m == n / 2; }

/// d^order/dx^order of periodic samples via the FFT. Odd derivatives drop the
/// Nyquist mode so the result stays real.
inline std::vector<double> spectral_derivative(RealFft& fft, std::span<const double> u, double L, int order) {
  const std::size_t n = fft.size();
  std::vector<std::complex<double>> s(fft.modes());
  fft.forward(u, s);
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (order % 2 == 1 && is_nyquist(m, n)) {
      s[m] = 0.0;
      continue;
    }
    s[m] *= std::pow(std::complex<double>(0.0, wavenumber(m, L)), order);
  }
  std::vector<double> out(n);
  fft.inverse(s, out);
  return out;
}

}  // namespace lps::data
