#pragma once

// Prolongation of a generator to jet space.
//
// With Q = phi - sum_i xi_i u_{x_i} the characteristic, the prolonged
// coefficients are phi^(J) = D_J Q + sum_i xi_i u_{J,i}. Along the solution
// encoded by a jet, total derivatives are ordinary derivatives of the composed
// function, so D_J Q is read off the Taylor expansion of Q(x, u(x)) built from
// the jet. This needs the jet to order n + 1; the order-(n+1) terms cancel.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/multi_index.hpp"
#include "lps/autodiff/taylor.hpp"
#include "lps/symmetry/vector_field.hpp"

namespace lps::sym {

// Entries: xi_1..xi_P, then phi^(J) for every |J| <= n in graded
// lexicographic order (J = 0 is phi itself). The layout matches jet-space
// coordinates (x_1..x_P, u, u_J...), so a PDE gradient contracts directly.
template <class N, std::size_t P>
struct ProlongedCoefficients {
  using Layout = ad::MultiIndexLayout<P>;

  int order = 0;
  std::vector<N> entries;

  std::size_t size() const noexcept { return entries.size(); }
  const N& xi(std::size_t i) const { return entries.at(i); }
  const N& phi() const { return entries.at(P); }
  const N& phi(std::size_t k) const { return entries.at(P + k); }
  const N& phi(const ad::Exponent<P>& alpha) const { return phi(Layout::index(alpha)); }
};

namespace detail {

template <class N, std::size_t P>
void require_order(const ad::Jet<N, P>& jet, int needed, const char* what) {
  if (jet.order < needed)
    throw std::invalid_argument(std::string(what) + ": jet of order " + std::to_string(jet.order) + " given, order " +
                                std::to_string(needed) + " required");
}

template <class N, std::size_t P>
std::array<ad::Taylor<N, P>, P> coordinates(const ad::Jet<N, P>& jet, int order) {
  return ad::coordinate_seeds<N, P>(jet.point, order);
}

}  // namespace detail

/// Q = phi - sum_i xi_i u_{x_i} at the jet point.
template <class N, std::size_t P>
N characteristic(const VectorField<P>& v, const ad::Jet<N, P>& jet) {
  detail::require_order(jet, 1, "characteristic");
  const auto x = detail::coordinates(jet, 0);
  const auto u = ad::Taylor<N, P>::constant(jet.u(), 0);
  const auto c = v.template operator()<N>(x, u);
  N q = c.phi[0];
  for (std::size_t i = 0; i < P; ++i) {
    ad::Exponent<P> e{};
    e[i] = 1;
    q = q - c.xi[i][0] * jet.at(e);
  }
  return q;
}

template <class N, std::size_t P>
ProlongedCoefficients<N, P> prolong(const VectorField<P>& v, const ad::Jet<N, P>& jet, int n) {
  using Layout = ad::MultiIndexLayout<P>;
  if (n < 0) throw std::invalid_argument("prolong: negative order");
  detail::require_order(jet, n + 1, "prolong");
  const auto x = detail::coordinates(jet, n + 1);
  const auto u = jet.taylor(n + 1);
  const auto c = v.template operator()<N>(x, u);

  ad::Taylor<N, P> q = c.phi.truncated(n);
  for (std::size_t i = 0; i < P; ++i) q = q - c.xi[i] * u.derivative(i);

  ProlongedCoefficients<N, P> out;
  out.order = n;
  out.entries.reserve(P + Layout::count(n));
  for (std::size_t i = 0; i < P; ++i) out.entries.push_back(c.xi[i][0]);
  for (std::size_t k = 0; k < Layout::count(n); ++k) {
    N e = q.partial(k);
    for (std::size_t i = 0; i < P; ++i) e = e + out.entries[i] * jet[Layout::shifted(k, i)];
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace lps::sym
