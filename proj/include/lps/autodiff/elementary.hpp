#pragma once

// Derivative sequences f(z), f'(z), ..., f^(k)(z) of the elementary functions.
// Every differentiable type in the library (Var, Dual, Taylor) draws its
// local derivative information from here, so each rule is written once.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lps::ad {

/// Highest jet order the engine supports (PDE order 3 plus one).
inline constexpr int kMaxJetOrder = 4;

/// Derivative sequences carry one extra entry beyond the jet order: the
/// reverse sweep through a Taylor composition needs f' expanded to full order.
inline constexpr int kMaxDerivs = kMaxJetOrder + 2;

using Derivs = std::array<double, kMaxDerivs>;

enum class Elementary { exp, log, sin, cos, tanh, elu, sqrt, recip };

namespace detail {

inline bool is_integer(double c) { return std::floor(c) == c; }

inline Derivs pow_derivs(double z, double c) {
  if (z < 0.0 && !is_integer(c)) throw std::domain_error("pow: negative base with non-integer exponent");
  if (z == 0.0 && !(is_integer(c) && c >= 0.0)) throw std::domain_error("pow: derivative undefined at zero base");
  Derivs d{};
  double falling = 1.0;
  for (int k = 0; k < kMaxDerivs; ++k) {
    d[k] = falling * std::pow(z, c - k);
    if (is_integer(c) && c >= 0.0 && k >= c) d[k] = (k == static_cast<int>(c)) ? falling : 0.0;
    falling *= (c - k);
  }
  return d;
}

// d^k/dz^k tanh(z) as a polynomial in y = tanh(z): p_{k+1}(y) = p_k'(y) (1 - y^2).
inline Derivs tanh_derivs(double z) {
  const double y = std::tanh(z);
  std::array<double, kMaxDerivs + 2> poly{};  // coefficients in y
  poly[1] = 1.0;
  Derivs d{};
  for (int k = 0; k < kMaxDerivs; ++k) {
    double v = 0.0;
    for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) v = v * y + poly[i];
    d[k] = v;
    std::array<double, kMaxDerivs + 2> next{};
    for (std::size_t i = 1; i < poly.size(); ++i) {
      const double dp = poly[i] * static_cast<double>(i);  // coefficient of y^(i-1) in p'
      next[i - 1] += dp;
      if (i + 1 < next.size()) next[i + 1] -= dp;
    }
    poly = next;
  }
  return d;
}

}  // namespace detail

inline Derivs derivs(Elementary f, double z) {
  Derivs d{};
  switch (f) {
    case Elementary::exp: {
      const double e = std::exp(z);
      d.fill(e);
      break;
    }
    case Elementary::log: {
      if (z <= 0.0) throw std::domain_error("log: non-positive argument");
      d[0] = std::log(z);
      double fact = 1.0;
      for (int k = 1; k < kMaxDerivs; ++k) {
        d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(z, k);
        fact *= k;
      }
      break;
    }
    case Elementary::sin:
    case Elementary::cos: {
      const double s = std::sin(z);
      const double c = std::cos(z);
      const std::array<double, 4> cycle = f == Elementary::sin ? std::array<double, 4>{s, c, -s, -c}
                                                               : std::array<double, 4>{c, -s, -c, s};
      for (int k = 0; k < kMaxDerivs; ++k) d[k] = cycle[k % 4];
      break;
    }
    case Elementary::tanh:
      d = detail::tanh_derivs(z);
      break;
    case Elementary::elu:
      // alpha = 1; C^1 at the origin, C^infinity elsewhere.
      if (z > 0.0) {
        d[0] = z;
        d[1] = 1.0;
      } else {
        const double e = std::exp(z);
        d.fill(e);
        d[0] = std::expm1(z);
      }
      break;
    case Elementary::sqrt:
      if (z <= 0.0) throw std::domain_error("sqrt: derivative undefined at non-positive argument");
      d = detail::pow_derivs(z, 0.5);
      break;
    case Elementary::recip: {
      if (z == 0.0) throw std::domain_error("division by zero");
      double fact = 1.0;
      for (int k = 0; k < kMaxDerivs; ++k) {
        d[k] = ((k % 2 == 0) ? 1.0 : -1.0) * fact / std::pow(z, k + 1);
        fact *= (k + 1);
      }
      break;
    }
  }
  return d;
}

inline Derivs pow_derivs(double z, double c) { return detail::pow_derivs(z, c); }

inline double elu(double z) { return z > 0.0 ? z : std::expm1(z); }

inline const char* name(Elementary f) {
  switch (f) {
    case Elementary::exp: return "exp";
    case Elementary::log: return "log";
    case Elementary::sin: return "sin";
    case Elementary::cos: return "cos";
    case Elementary::tanh: return "tanh";
    case Elementary::elu: return "elu";
    case Elementary::sqrt: return "sqrt";
    case Elementary::recip: return "recip";
  }
  return "?";
}

}  // namespace lps::ad
