#pragma once

// Uniform space-time grids, truncated Fourier initial conditions
//   f(x) = sum_k A_k sin(2 pi l_k x / L + phi_k)
// and the exact heat solution for them.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/taylor.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/util/random.hpp"

namespace lps::data {

// x_j = j L / nx for j < nx (periodic, x = L is x = 0), t_k = k T / (nt - 1).
struct Grid {
  double L = 2.0 * std::numbers::pi;
  double T = 16.0;
  std::size_t nx = 256;
  std::size_t nt = 100;
  bool periodic = true;

  double x(std::size_t j) const { return L * static_cast<double>(j) / static_cast<double>(nx); }
  double t(std::size_t k) const { return T * static_cast<double>(k) / static_cast<double>(nt - 1); }
  double dx() const { return L / static_cast<double>(nx); }
  double dt() const { return T / static_cast<double>(nt - 1); }

  void validate() const {
    if (!(L > 0.0) || !(T > 0.0)) throw std::invalid_argument("grid: L and T must be positive");
    if (nx < 4 || nt < 2) throw std::invalid_argument("grid: need nx >= 4 and nt >= 2");
  }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IcSampling {
  std::size_t K = 10;
  Range amplitude{-0.5, 0.5};
  std::int64_t l_min = 1;
  std::int64_t l_max = 3;
  Range phase{0.0, 2.0 * std::numbers::pi};
};

struct InitialCondition {
  double L = 2.0 * std::numbers::pi;
  std::vector<double> A;
  std::vector<int> l;
  std::vector<double> phi;

  std::size_t K() const noexcept { return A.size(); }
  double wavenumber(std::size_t k) const { return 2.0 * std::numbers::pi * l[k] / L; }

  template <class X>
  X operator()(const X& x) const {
    X r = x * 0.0;
    for (std::size_t k = 0; k < K(); ++k) r = r + A[k] * ad::sin(x * wavenumber(k) + phi[k]);
    return r;
  }
  double operator()(double x) const {
    double r = 0.0;
    for (std::size_t k = 0; k < K(); ++k) r += A[k] * std::sin(wavenumber(k) * x + phi[k]);
    return r;
  }
};

inline InitialCondition sample_initial_condition(Rng& rng, double L, const IcSampling& s) {
  if (s.K < 1) throw std::invalid_argument("initial condition needs K >= 1");
  if (!(s.amplitude.lo <= s.amplitude.hi) || s.l_min > s.l_max || !(s.phase.lo <= s.phase.hi))
    throw std::invalid_argument("initial condition: empty coefficient range");
  InitialCondition ic;
  ic.L = L;
  for (std::size_t k = 0; k < s.K; ++k) {
    ic.A.push_back(rng.uniform(s.amplitude.lo, s.amplitude.hi));
    ic.l.push_back(static_cast<int>(rng.uniform_int(s.l_min, s.l_max)));
    ic.phi.push_back(rng.uniform(s.phase.lo, s.phase.hi));
  }
  return ic;
}

/// sum_k A_k exp(-nu kappa_k^2 t) sin(kappa_k x + phi_k), for double or Taylor arguments.
template <class X>
X heat_exact(const InitialCondition& ic, double nu, const X& t, const X& x) {
  if constexpr (std::is_same_v<X, double>) {
    double r = 0.0;
    for (std::size_t k = 0; k < ic.K(); ++k) {
      const double kap = ic.wavenumber(k);
      r += ic.A[k] * std::exp(-nu * kap * kap * t) * std::sin(kap * x + ic.phi[k]);
    }
    return r;
  } else {
    X r = x * 0.0;
    for (std::size_t k = 0; k < ic.K(); ++k) {
      const double kap = ic.wavenumber(k);
      r = r + ic.A[k] * (ad::exp(t * (-nu * kap * kap)) * ad::sin(x * kap + ic.phi[k]));
    }
    return r;
  }
}

/// Exact heat solution sampled on the grid, row-major (nt x nx).
inline std::vector<double> heat_grid(const InitialCondition& ic, double nu, const Grid& g) {
  std::vector<double> u(g.nt * g.nx);
  for (std::size_t k = 0; k < g.nt; ++k)
    for (std::size_t j = 0; j < g.nx; ++j) u[k * g.nx + j] = heat_exact(ic, nu, g.t(k), g.x(j));
  return u;
}

}  // namespace lps::data
