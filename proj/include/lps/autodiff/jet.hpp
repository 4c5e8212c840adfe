#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/multi_index.hpp"
#include "lps/autodiff/taylor.hpp"

namespace lps::ad {

// Jet: a point of the jet space X x U^(n) for a single dependent variable.
// `partials[k]` is d^alpha_k u at `point`, in graded lexicographic layout
// (partials[0] is u itself). Mixed partials are stored once.
template <class N, std::size_t P>
struct Jet {
  using Layout = MultiIndexLayout<P>;

  std::array<double, P> point{};
  int order = 0;
  std::vector<N> partials;

  Jet() = default;
  Jet(const std::array<double, P>& at, int n) : point(at), order(n), partials(Layout::count(n)) {
    if (n < 0 || n > kMaxJetOrder) throw std::out_of_range("Jet: order outside [0, 4]");
  }

  const N& u() const { return partials[0]; }
  const N& operator[](std::size_t k) const { return partials[k]; }
  N& operator[](std::size_t k) { return partials[k]; }

  /// Entry for the exponent vector, e.g. at({2, 0}) is u_xx for (x, t).
  const N& at(const Exponent<P>& alpha) const {
    const std::size_t k = Layout::index(alpha);
    if (k >= partials.size()) throw std::out_of_range("Jet::at: derivative above jet order");
    return partials[k];
  }
  N& at(const Exponent<P>& alpha) {
    const std::size_t k = Layout::index(alpha);
    if (k >= partials.size()) throw std::out_of_range("Jet::at: derivative above jet order");
    return partials[k];
  }

  /// The Taylor polynomial of u at `point` reproduced by this jet.
  Taylor<N, P> taylor() const { return taylor(order); }
  Taylor<N, P> taylor(int n) const {
    if (n > order) throw std::invalid_argument("Jet::taylor: order above jet order");
    Taylor<N, P> t(n);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = partials[k] * (1.0 / Layout::factorial(k));
    return t;
  }

  static Jet from_taylor(const std::array<double, P>& at, const Taylor<N, P>& t) {
    Jet j(at, t.order());
    for (std::size_t k = 0; k < t.size(); ++k) j.partials[k] = t.partial(k);
    return j;
  }
};

/// Seeds the coordinate functions at `point` for an order-n expansion.
template <class N, std::size_t P>
std::array<Taylor<N, P>, P> coordinate_seeds(const std::array<double, P>& point, int order) {
  std::array<Taylor<N, P>, P> seeds;
  for (std::size_t i = 0; i < P; ++i) seeds[i] = Taylor<N, P>::variable(point[i], i, order);
  return seeds;
}

/// All partials of f up to `order` at `point`. f maps the seeded coordinates
/// (std::array<Taylor<N, P>, P>) to a Taylor<N, P>; with N = Var the jet stays
/// differentiable with respect to everything f recorded.
template <class N, std::size_t P, class F>
Jet<N, P> jet_of(F&& f, const std::array<double, P>& point, int order) {
  if (order < 1 || order > kMaxJetOrder) throw std::invalid_argument("jet_of: order must lie in [1, 4]");
  const auto seeds = coordinate_seeds<N, P>(point, order);
  const Taylor<N, P> out = std::invoke(std::forward<F>(f), seeds);
  if (out.order() != order) throw std::logic_error("jet_of: evaluation lost Taylor order");
  return Jet<N, P>::from_taylor(point, out);
}

}  // namespace lps::ad
