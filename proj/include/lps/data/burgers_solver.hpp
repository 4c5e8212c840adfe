#pragma once

// Pseudo-spectral solver for u_t = nu u_xx - u u_x with periodic boundaries.
// Diffusion is integrated exactly with an integrating factor, the advection
// term -(u^2/2)_x explicitly with RK4; the nonlinear term is dealiased with
// the 2/3 rule.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lps/data/fft.hpp"
#include "lps/data/initial_condition.hpp"

namespace lps::data {

class SolverBlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BurgersSolveStats {
  double dt = 0.0;
  std::size_t steps = 0;
};

/// Solution on the grid, row-major (nt x nx). Row 0 is the sampled initial condition.
inline std::vector<double> burgers_spectral_solve(const InitialCondition& ic, double nu, const Grid& g,
                                                  BurgersSolveStats* stats = nullptr) {
  g.validate();
  if (!g.periodic) throw std::invalid_argument("Burgers solver needs a periodic grid");
  if (!is_power_of_two(g.nx)) throw std::invalid_argument("Burgers solver needs nx to be a power of two");
  const std::size_t n = g.nx;
  RealFft fft(n);
  const std::size_t nm = fft.modes();
  using C = std::complex<double>;

  std::vector<double> u0(n);
  for (std::size_t j = 0; j < n; ++j) u0[j] = ic(g.x(j));
  double umax = 0.0;
  for (double v : u0) umax = std::max(umax, std::abs(v));

  const double out_dt = g.dt();
  double dt = g.T / (10.0 * static_cast<double>(g.nt));
  if (umax > 0.0) dt = std::min(dt, 0.5 * g.dx() / umax);
  const auto sub = static_cast<std::size_t>(std::ceil(out_dt / dt - 1e-12));
  dt = out_dt / static_cast<double>(sub);

  std::vector<double> k(nm), ikh(nm), e_half(nm), e_full(nm);
  const std::size_t cutoff = n / 3;
  for (std::size_t m = 0; m < nm; ++m) {
    k[m] = wavenumber(m, g.L);
    e_half[m] = std::exp(-nu * k[m] * k[m] * dt / 2.0);
    e_full[m] = e_half[m] * e_half[m];
    // -(i k / 2) applied to FFT(u^2), zero beyond the 2/3 cutoff and at Nyquist
    ikh[m] = (m > cutoff || is_nyquist(m, n)) ? 0.0 : k[m] / 2.0;
  }

  std::vector<double> phys(n);
  std::vector<C> sq(nm);
  auto nonlinear = [&](const std::vector<C>& uh, std::vector<C>& out) {
    fft.inverse(uh, phys);
    for (double& v : phys) v = v * v;
    fft.forward(phys, sq);
    for (std::size_t m = 0; m < nm; ++m) out[m] = C(0.0, -ikh[m]) * sq[m];
  };

  std::vector<C> uh(nm), a(nm), b(nm), c(nm), d(nm), tmp(nm);
  fft.forward(u0, uh);

  std::vector<double> out(g.nt * n);
  std::copy(u0.begin(), u0.end(), out.begin());
  for (std::size_t row = 1; row < g.nt; ++row) {
    for (std::size_t s = 0; s < sub; ++s) {
      nonlinear(uh, a);
      for (std::size_t m = 0; m < nm; ++m) tmp[m] = e_half[m] * (uh[m] + 0.5 * dt * a[m]);
      nonlinear(tmp, b);
      for (std::size_t m = 0; m < nm; ++m) tmp[m] = e_half[m] * uh[m] + 0.5 * dt * b[m];
      nonlinear(tmp, c);
      for (std::size_t m = 0; m < nm; ++m) tmp[m] = e_full[m] * uh[m] + dt * e_half[m] * c[m];
      nonlinear(tmp, d);
      for (std::size_t m = 0; m < nm; ++m)
        uh[m] = e_full[m] * uh[m] + dt / 6.0 * (e_full[m] * a[m] + 2.0 * e_half[m] * (b[m] + c[m]) + d[m]);
    }
    std::span<double> dst(out.data() + row * n, n);
    fft.inverse(uh, dst);
    for (double v : dst) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "Burgers solver blew up before t = " << g.t(row) << " (dt = " << dt << ", nu = " << nu
            << ", max|u0| = " << umax << ")";
        throw SolverBlowUp(msg.str());
      }
    }
  }
  if (stats) *stats = {dt, sub * (g.nt - 1)};
  return out;
}

}  // namespace lps::data
