#pragma once

// A scalar PDE Delta(x, u^(n)) = 0 on jet space together with its symmetry
// generators. The residual is written once as a generic callable over the
// jet-space coordinate vector (x_1..x_P, u, u_J...) and instantiated for
// double, Var and their first-order duals; the duals give the jet-space
// gradient J_Delta.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lps/autodiff/dual.hpp"
#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/symmetry/vector_field.hpp"

namespace lps::pdes {

/// Jet-space coordinates (x_1..x_P, u, u_J...) of a jet.
template <class N, std::size_t P>
std::vector<N> jet_coordinates(const ad::Jet<N, P>& jet) {
  std::vector<N> c;
  c.reserve(P + jet.partials.size());
  for (double x : jet.point) c.push_back(N(x));
  c.insert(c.end(), jet.partials.begin(), jet.partials.end());
  return c;
}

template <std::size_t P>
class PdeSystem {
 public:
  template <class X>
  using ResidualFn = std::function<X(std::span<const X>)>;

  PdeSystem() = default;

  /// residual(coords) -> X for X in {double, Var, Dual<double>, Dual<Var>}.
  template <class F>
  PdeSystem(std::string name, int order, F residual, std::vector<sym::VectorField<P>> generators,
            std::vector<bool> useful, std::map<std::string, double> params = {})
      : name_(std::move(name)),
        order_(order),
        rd_(residual),
        rv_(residual),
        rdd_(residual),
        rdv_(residual),
        generators_(std::move(generators)),
        useful_(std::move(useful)),
        params_(std::move(params)) {
    if (order_ < 1 || order_ + 1 > ad::kMaxJetOrder) throw std::invalid_argument("PDE order must lie in [1, 3]");
    if (useful_.size() != generators_.size()) throw std::invalid_argument("useful mask size differs from generators");
  }

  const std::string& name() const noexcept { return name_; }
  int order() const noexcept { return order_; }
  const std::vector<sym::VectorField<P>>& generators() const noexcept { return generators_; }
  const std::vector<bool>& useful_mask() const noexcept { return useful_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }

  /// Index of the generator with the given name.
  std::size_t generator_index(const std::string& name) const {
    for (std::size_t k = 0; k < generators_.size(); ++k)
      if (generators_[k].name() == name) return k;
    throw std::invalid_argument("PDE '" + name_ + "' has no generator '" + name + "'");
  }

  template <class X>
  X residual(std::span<const X> coords) const {
    if (coords.size() < P + ad::MultiIndexLayout<P>::count(order_))
      throw std::invalid_argument("residual: jet coordinates below the PDE order");
    if constexpr (std::is_same_v<X, double>) {
      return rd_(coords);
    } else if constexpr (std::is_same_v<X, ad::Var>) {
      return rv_(coords);
    } else if constexpr (std::is_same_v<X, ad::Dual<double>>) {
      return rdd_(coords);
    } else {
      return rdv_(coords);
    }
  }

  template <class N>
  N residual(const ad::Jet<N, P>& jet) const {
    const auto c = jet_coordinates(jet);
    return residual<N>(std::span<const N>(c));
  }

  /// J_Delta over every coordinate of the jet (zeros beyond what Delta reads).
  template <class N>
  std::vector<N> gradient(const ad::Jet<N, P>& jet) const {
    if (jet.order < order_) throw std::invalid_argument("gradient: jet order below the PDE order");
    const auto c = jet_coordinates(jet);
    const std::size_t m = P + ad::MultiIndexLayout<P>::count(order_);
    std::vector<ad::Dual<N>> d(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) d[k] = ad::Dual<N>(c[k], N(0.0));
    std::vector<N> g(c.size(), N(0.0));
    for (std::size_t k = 0; k < m; ++k) {
      d[k].d = N(1.0);
      g[k] = residual<ad::Dual<N>>(std::span<const ad::Dual<N>>(d)).d;
      d[k].d = N(0.0);
    }
    return g;
  }

 private:
  std::string name_;
  int order_ = 0;
  ResidualFn<double> rd_;
  ResidualFn<ad::Var> rv_;
  ResidualFn<ad::Dual<double>> rdd_;
  ResidualFn<ad::Dual<ad::Var>> rdv_;
  std::vector<sym::VectorField<P>> generators_;
  std::vector<bool> useful_;
  std::map<std::string, double> params_;
};

}  // namespace lps::pdes
