#pragma once

// Truncated multivariate Taylor polynomials.
//
// Taylor<T, P> holds the normalized coefficients f_alpha / alpha! of a function
// of P independent variables around a point, truncated at a runtime order
// (<= kMaxJetOrder). T is either double or Var. For Var, products and
// elementary functions are recorded as fused nodes whose partials come from
// the double-valued expansion, so a reverse sweep over them is exact.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "lps/autodiff/elementary.hpp"
#include "lps/autodiff/multi_index.hpp"
#include "lps/autodiff/var.hpp"

namespace lps::ad {

template <class T, std::size_t P>
class Taylor {
 public:
  using Layout = MultiIndexLayout<P>;
  using value_type = T;
  static constexpr std::size_t kVars = P;

  Taylor() = default;

  static Taylor constant(const T& v, int order) {
    Taylor r(order);
    r.c_[0] = v;
    return r;
  }

  /// The coordinate function x_i expanded around `at`.
  static Taylor variable(double at, std::size_t i, int order) {
    if (i >= P) throw std::out_of_range("Taylor::variable: variable index out of range");
    Taylor r(order);
    r.c_[0] = T(at);
    if (order >= 1) {
      Exponent<P> e{};
      e[i] = 1;
      r.c_[Layout::index(e)] = T(1.0);
    }
    return r;
  }

  explicit Taylor(int order) : order_(order) {
    if (order < 0 || order > kMaxJetOrder) throw std::out_of_range("Taylor: order outside [0, 4]");
  }

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return Layout::count(order_); }

  T& operator[](std::size_t k) { return c_[k]; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  const T& value() const { return c_[0]; }

  std::span<const T> coefficients() const { return {c_.data(), size()}; }

  /// Same series at a lower order.
  Taylor truncated(int order) const {
    if (order > order_) throw std::invalid_argument("Taylor::truncated: cannot raise the order");
    Taylor r(order);
    std::copy_n(c_.begin(), r.size(), r.c_.begin());
    return r;
  }

  /// d/dx_i of the series; the result has order one less.
  Taylor derivative(std::size_t i) const {
    if (order_ == 0) throw std::invalid_argument("Taylor::derivative: order-0 series");
    Taylor r(order_ - 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const std::size_t s = Layout::shifted(k, i);
      r.c_[k] = c_[s] * static_cast<double>(Layout::kExponents[k][i] + 1);
    }
    return r;
  }

  /// Partial derivative d^alpha f at the expansion point.
  T partial(std::size_t k) const { return c_[k] * Layout::factorial(k); }

  Taylor& operator+=(const Taylor& b) { return *this = *this + b; }
  Taylor& operator-=(const Taylor& b) { return *this = *this - b; }
  Taylor& operator*=(const Taylor& b) { return *this = *this * b; }

 private:
  int order_ = 0;
  std::array<T, Layout::kCapacity> c_{};
};

template <class T>
struct is_taylor : std::false_type {};
template <class T, std::size_t P>
struct is_taylor<Taylor<T, P>> : std::true_type {};
template <class T>
inline constexpr bool is_taylor_v = is_taylor<T>::value;

namespace detail {

template <class T, std::size_t P, class F>
Taylor<T, P> elementwise(const Taylor<T, P>& a, const Taylor<T, P>& b, F f) {
  Taylor<T, P> r(std::min(a.order(), b.order()));
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = f(a[k], b[k]);
  return r;
}

template <std::size_t P>
Taylor<double, P> multiply(const Taylor<double, P>& a, const Taylor<double, P>& b) {
  const int m = std::min(a.order(), b.order());
  const auto& plan = MultiIndexLayout<P>::plan(m);
  Taylor<double, P> r(m);
  for (std::size_t k = 0; k < r.size(); ++k) {
    double s = 0.0;
    for (std::uint32_t e = plan.begin[k]; e < plan.begin[k + 1]; ++e) s += a[plan.lhs[e]] * b[plan.rhs[e]];
    r[k] = s;
  }
  return r;
}

template <std::size_t P>
Taylor<Var, P> multiply(const Taylor<Var, P>& a, const Taylor<Var, P>& b) {
  const int m = std::min(a.order(), b.order());
  const auto& plan = MultiIndexLayout<P>::plan(m);
  Tape* tape = has_active_tape() ? &active_tape() : nullptr;
  Taylor<Var, P> r(m);
  for (std::size_t k = 0; k < r.size(); ++k) {
    double s = 0.0;
    for (std::uint32_t e = plan.begin[k]; e < plan.begin[k + 1]; ++e) {
      const Var& x = a[plan.lhs[e]];
      const Var& y = b[plan.rhs[e]];
      s += x.v * y.v;
      if (!x.is_constant() && y.v != 0.0) tape->add_edge(x.id, y.v);
      if (!y.is_constant() && x.v != 0.0) tape->add_edge(y.id, x.v);
    }
    r[k] = tape ? Var(s, tape->finish_node(s)) : Var(s);
  }
  return r;
}

inline double to_double(double v) { return v; }
inline double to_double(const Var& v) { return v.v; }

template <class T, std::size_t P>
Taylor<double, P> values(const Taylor<T, P>& a) {
  Taylor<double, P> r(a.order());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = to_double(a[k]);
  return r;
}

/// sum_k d[offset + k] / k! * delta^k with delta = z - z(0).
template <std::size_t P>
Taylor<double, P> horner(const Taylor<double, P>& z, const Derivs& d, int offset) {
  const int m = z.order();
  Taylor<double, P> delta = z;
  delta[0] = 0.0;
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  Taylor<double, P> r = Taylor<double, P>::constant(d[offset + m] / fact, m);
  for (int k = m - 1; k >= 0; --k) {
    fact /= (k + 1);
    r = multiply(r, delta);
    r[0] += d[offset + k] / fact;
  }
  return r;
}

template <std::size_t P>
Taylor<double, P> compose(const Taylor<double, P>& z, const Derivs& d) {
  return horner(z, d, 0);
}

// f(z) for a Var series: output k depends on input b with partial
// (f'(z))_{k-b}, the coefficient of the composed first derivative.
template <std::size_t P>
Taylor<Var, P> compose(const Taylor<Var, P>& z, const Derivs& d) {
  const Taylor<double, P> zv = values(z);
  const Taylor<double, P> out = horner(zv, d, 0);
  const Taylor<double, P> slope = horner(zv, d, 1);
  const int m = z.order();
  const auto& plan = MultiIndexLayout<P>::plan(m);
  Tape* tape = has_active_tape() ? &active_tape() : nullptr;
  Taylor<Var, P> r(m);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (tape) {
      for (std::uint32_t e = plan.begin[k]; e < plan.begin[k + 1]; ++e) {
        const Var& in = z[plan.lhs[e]];
        const double partial = slope[plan.rhs[e]];
        if (!in.is_constant() && partial != 0.0) tape->add_edge(in.id, partial);
      }
      r[k] = Var(out[k], tape->finish_node(out[k]));
    } else {
      r[k] = Var(out[k]);
    }
  }
  return r;
}

template <class T, std::size_t P>
Taylor<T, P> apply(Elementary f, const Taylor<T, P>& z) {
  return compose(z, derivs(f, to_double(z[0])));
}

}  // namespace detail

template <class T, std::size_t P>
Taylor<T, P> operator+(const Taylor<T, P>& a, const Taylor<T, P>& b) {
  return detail::elementwise(a, b, [](const T& x, const T& y) { return x + y; });
}
template <class T, std::size_t P>
Taylor<T, P> operator-(const Taylor<T, P>& a, const Taylor<T, P>& b) {
  return detail::elementwise(a, b, [](const T& x, const T& y) { return x - y; });
}
template <class T, std::size_t P>
Taylor<T, P> operator-(const Taylor<T, P>& a) {
  Taylor<T, P> r(a.order());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = -a[k];
  return r;
}
template <class T, std::size_t P>
Taylor<T, P> operator*(const Taylor<T, P>& a, const Taylor<T, P>& b) {
  return detail::multiply(a, b);
}

// Scalar mixing. S is double or T itself.
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator+(const Taylor<T, P>& a, const S& s) {
  Taylor<T, P> r = a;
  r[0] = a[0] + T(s);
  return r;
}
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator+(const S& s, const Taylor<T, P>& a) {
  return a + s;
}
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator-(const Taylor<T, P>& a, const S& s) {
  Taylor<T, P> r = a;
  r[0] = a[0] - T(s);
  return r;
}
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator-(const S& s, const Taylor<T, P>& a) {
  Taylor<T, P> r = -a;
  r[0] = r[0] + T(s);
  return r;
}
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator*(const Taylor<T, P>& a, const S& s) {
  Taylor<T, P> r(a.order());
  const T f(s);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] * f;
  return r;
}
template <class T, std::size_t P, class S>
  requires std::is_convertible_v<S, T>
Taylor<T, P> operator*(const S& s, const Taylor<T, P>& a) {
  return a * s;
}

template <class T, std::size_t P>
Taylor<T, P> reciprocal(const Taylor<T, P>& a) {
  return detail::apply(Elementary::recip, a);
}
template <class T, std::size_t P>
Taylor<T, P> operator/(const Taylor<T, P>& a, const Taylor<T, P>& b) {
  return a * reciprocal(b);
}
template <class T, std::size_t P>
Taylor<T, P> operator/(const Taylor<T, P>& a, double s) {
  if (s == 0.0) throw std::domain_error("division by zero");
  return a * (1.0 / s);
}
template <class T, std::size_t P>
Taylor<T, P> operator/(double s, const Taylor<T, P>& a) {
  return reciprocal(a) * s;
}

template <class T, std::size_t P>
Taylor<T, P> exp(const Taylor<T, P>& a) {
  return detail::apply(Elementary::exp, a);
}
template <class T, std::size_t P>
Taylor<T, P> log(const Taylor<T, P>& a) {
  return detail::apply(Elementary::log, a);
}
template <class T, std::size_t P>
Taylor<T, P> sin(const Taylor<T, P>& a) {
  return detail::apply(Elementary::sin, a);
}
template <class T, std::size_t P>
Taylor<T, P> cos(const Taylor<T, P>& a) {
  return detail::apply(Elementary::cos, a);
}
template <class T, std::size_t P>
Taylor<T, P> tanh(const Taylor<T, P>& a) {
  return detail::apply(Elementary::tanh, a);
}
template <class T, std::size_t P>
Taylor<T, P> elu(const Taylor<T, P>& a) {
  return detail::apply(Elementary::elu, a);
}
template <class T, std::size_t P>
Taylor<T, P> sqrt(const Taylor<T, P>& a) {
  return detail::apply(Elementary::sqrt, a);
}
template <class T, std::size_t P>
Taylor<T, P> pow(const Taylor<T, P>& a, double c) {
  return detail::compose(a, pow_derivs(detail::to_double(a[0]), c));
}

}  // namespace lps::ad
