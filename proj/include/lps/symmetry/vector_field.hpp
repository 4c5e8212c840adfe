#pragma once

// Infinitesimal generators v = sum_i xi_i(x, u) d/dx_i + phi(x, u) d/du for a
// single dependent variable. Coefficient functions are written once as a
// generic callable and instantiated for Taylor<double, P> and Taylor<Var, P>,
// which is what prolongation feeds them.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "lps/autodiff/taylor.hpp"
#include "lps/autodiff/var.hpp"

namespace lps::sym {

template <class X, std::size_t P>
struct Coefficients {
  std::array<X, P> xi;
  X phi;
};

/// Constant series with the order of `like`.
template <class X>
X constant_like(const X& like, double c) {
  if constexpr (ad::is_taylor_v<X>) {
    return X::constant(typename X::value_type(c), like.order());
  } else {
    return X(c);
  }
}

template <std::size_t P>
class VectorField {
 public:
  template <class N>
  using Series = ad::Taylor<N, P>;
  template <class N>
  using Fn = std::function<Coefficients<Series<N>, P>(const std::array<Series<N>, P>&, const Series<N>&)>;

  VectorField() = default;

  /// f(x, u) -> Coefficients<X, P> for X = Taylor<double, P> and Taylor<ad::Var, P>.
  template <class F>
  static VectorField make(std::string name, F f) {
    VectorField v;
    v.name_ = std::move(name);
    v.fd_ = f;
    v.fv_ = f;
    return v;
  }

  const std::string& name() const noexcept { return name_; }

  template <class N>
  Coefficients<Series<N>, P> operator()(const std::array<Series<N>, P>& x, const Series<N>& u) const {
    if constexpr (std::is_same_v<N, double>) {
      return fd_(x, u);
    } else {
      return fv_(x, u);
    }
  }

  /// Plain coefficient values at (x, u).
  Coefficients<double, P> at(const std::array<double, P>& x, double u) const {
    std::array<Series<double>, P> xs;
    for (std::size_t i = 0; i < P; ++i) xs[i] = Series<double>::constant(x[i], 0);
    const auto c = fd_(xs, Series<double>::constant(u, 0));
    Coefficients<double, P> r;
    for (std::size_t i = 0; i < P; ++i) r.xi[i] = c.xi[i][0];
    r.phi = c.phi[0];
    return r;
  }

  /// a * v + b * w.
  static VectorField combine(double a, const VectorField& v, double b, const VectorField& w, std::string name = {}) {
    if (name.empty()) name = std::to_string(a) + "*" + v.name_ + " + " + std::to_string(b) + "*" + w.name_;
    return make(std::move(name), [a, b, v, w](const auto& x, const auto& u) {
      using N = typename std::decay_t<decltype(u)>::value_type;
      const auto cv = v.template operator()<N>(x, u);
      const auto cw = w.template operator()<N>(x, u);
      Coefficients<Series<N>, P> r;
      for (std::size_t i = 0; i < P; ++i) r.xi[i] = cv.xi[i] * a + cw.xi[i] * b;
      r.phi = cv.phi * a + cw.phi * b;
      return r;
    });
  }

 private:
  std::string name_;
  Fn<double> fd_;
  Fn<ad::Var> fv_;
};

}  // namespace lps::sym
