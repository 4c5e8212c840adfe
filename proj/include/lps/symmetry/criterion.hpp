#pragma once

// Symmetry residuals J_Delta . coef(pr^(n) v), the infinitesimal criterion
// check on solution jets, and a mechanical classification of generators by
// the signal their residual carries off-shell.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/pdes/pde_system.hpp"
#include "lps/symmetry/prolong.hpp"
#include "lps/util/random.hpp"

namespace lps::sym {

inline constexpr double kCosineEps = 1e-8;

namespace detail {

inline bool is_structural_zero(double v) { return v == 0.0; }
inline bool is_structural_zero(const ad::Var& v) { return v.is_constant() && v.v == 0.0; }

}  // namespace detail

/// Straight contraction over the coefficient entries.
template <class N>
N contract(std::span<const N> gradient, std::span<const N> coef) {
  N s(0.0);
  const std::size_t m = std::min(gradient.size(), coef.size());
  for (std::size_t k = 0; k < m; ++k)
    if (!detail::is_structural_zero(gradient[k])) s = s + gradient[k] * coef[k];
  return s;
}

template <class N, std::size_t P>
N symmetry_residual(const pdes::PdeSystem<P>& pde, const VectorField<P>& v, const ad::Jet<N, P>& jet) {
  const auto coef = prolong(v, jet, pde.order());
  const auto grad = pde.gradient(jet);
  return contract<N>(grad, coef.entries);
}

/// J.c / (|J| |c| + eps); zero when either norm is below eps.
template <class N>
N cosine(std::span<const N> gradient, std::span<const N> coef, double eps = kCosineEps) {
  const std::size_t m = std::min(gradient.size(), coef.size());
  N gg(0.0), cc(0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (!detail::is_structural_zero(gradient[k])) gg = gg + gradient[k] * gradient[k];
    cc = cc + coef[k] * coef[k];
  }
  using ad::sqrt;
  if (!(ad::value_of(gg) > eps * eps) || !(ad::value_of(cc) > eps * eps)) return N(0.0);
  return contract(gradient, coef) / (sqrt(gg) * sqrt(cc) + eps);
}

template <class N, std::size_t P>
N cosine_symmetry_residual(const pdes::PdeSystem<P>& pde, const VectorField<P>& v, const ad::Jet<N, P>& jet,
                           double eps = kCosineEps) {
  const auto coef = prolong(v, jet, pde.order());
  const auto grad = pde.gradient(jet);
  return cosine<N>(grad, coef.entries, eps);
}

struct CriterionReport {
  double max_abs_residual = 0.0;
  bool pass = false;
};

template <std::size_t P>
CriterionReport criterion_check(const pdes::PdeSystem<P>& pde, const VectorField<P>& v,
                                std::span<const ad::Jet<double, P>> jets, double tol) {
  CriterionReport r;
  for (const auto& jet : jets) {
    const double res = std::abs(symmetry_residual<double>(pde, v, jet));
    r.max_abs_residual = std::max(r.max_abs_residual, std::isnan(res) ? INFINITY : res);
  }
  r.pass = r.max_abs_residual <= tol;
  return r;
}

/// Jet with coordinates and partials drawn uniformly from [-scale, scale].
template <std::size_t P>
ad::Jet<double, P> random_jet(Rng& rng, int order, double scale = 1.0) {
  std::array<double, P> at;
  for (auto& a : at) a = rng.uniform(-scale, scale);
  ad::Jet<double, P> jet(at, order);
  for (auto& p : jet.partials) p = rng.uniform(-scale, scale);
  return jet;
}

enum class GeneratorClass { zero, delta_proportional, useful };

inline std::string to_string(GeneratorClass c) {
  switch (c) {
    case GeneratorClass::zero:
      return "identically-zero";
    case GeneratorClass::delta_proportional:
      return "delta-proportional";
    default:
      return "useful";
  }
}

struct Classification {
  GeneratorClass kind = GeneratorClass::useful;
  double max_abs_residual = 0.0;  // over the off-shell probes
  double ratio = 0.0;             // residual / Delta when proportional
};

// Off-shell probe: a residual that vanishes everywhere carries no signal, one
// equal to c * Delta only rescales the PDE loss; anything else is useful.
template <std::size_t P>
Classification classify(const pdes::PdeSystem<P>& pde, const VectorField<P>& v, std::uint64_t seed = 0,
                        int probes = 32) {
  Rng rng(seed);
  Classification c;
  std::vector<double> ratios;
  for (int k = 0; k < probes; ++k) {
    const auto jet = random_jet<P>(rng, pde.order() + 1);
    const double r = symmetry_residual<double>(pde, v, jet);
    const double d = pde.residual(jet);
    c.max_abs_residual = std::max(c.max_abs_residual, std::abs(r));
    if (std::abs(d) > 1e-3) ratios.push_back(r / d);
  }
  if (c.max_abs_residual <= 1e-10) {
    c.kind = GeneratorClass::zero;
    return c;
  }
  const double r0 = ratios.empty() ? 0.0 : ratios.front();
  bool constant = !ratios.empty();
  for (double q : ratios) constant = constant && std::abs(q - r0) <= 1e-8 * std::max(1.0, std::abs(r0));
  c.kind = constant ? GeneratorClass::delta_proportional : GeneratorClass::useful;
  c.ratio = constant ? r0 : 0.0;
  return c;
}

}  // namespace lps::sym
