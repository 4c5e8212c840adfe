#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/elementary.hpp"
#include "lps/autodiff/tape.hpp"

namespace lps::ad {

// Var: a float64 value plus a handle into the active computation record.
// Values built only from constants stay constants and never touch the tape.
struct Var {
  double v = 0.0;
  std::uint32_t id = kConstantId;

  constexpr Var() = default;
  constexpr Var(double value) : v(value) {}  // NOLINT: implicit constant lift
  constexpr Var(double value, std::uint32_t node) : v(value), id(node) {}

  constexpr double value() const noexcept { return v; }
  constexpr bool is_constant() const noexcept { return id == kConstantId; }
};

/// Leaf on the active record.
inline Var record_scalar(double value) { return {value, active_tape().leaf(value)}; }

inline std::vector<Var> record_scalars(std::span<const double> values) {
  Tape& tape = active_tape();
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.emplace_back(v, tape.leaf(v));
  return out;
}

namespace detail {

inline Var make_unary(double v, const Var& a, double da) {
  if (a.is_constant()) return Var(v);
  return {v, active_tape().unary(v, a.id, da)};
}

inline Var make_binary(double v, const Var& a, double da, const Var& b, double db) {
  if (a.is_constant()) return make_unary(v, b, db);
  if (b.is_constant()) return make_unary(v, a, da);
  return {v, active_tape().binary(v, a.id, da, b.id, db)};
}

inline Var apply(Elementary f, const Var& a) {
  const Derivs d = derivs(f, a.v);
  return make_unary(d[0], a, d[1]);
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::make_binary(a.v + b.v, a, 1.0, b, 1.0); }
inline Var operator-(const Var& a, const Var& b) { return detail::make_binary(a.v - b.v, a, 1.0, b, -1.0); }
inline Var operator*(const Var& a, const Var& b) { return detail::make_binary(a.v * b.v, a, b.v, b, a.v); }
inline Var operator/(const Var& a, const Var& b) {
  if (b.v == 0.0) throw std::domain_error("division by zero");
  const double q = a.v / b.v;
  return detail::make_binary(q, a, 1.0 / b.v, b, -q / b.v);
}
inline Var operator-(const Var& a) { return detail::make_unary(-a.v, a, -1.0); }

inline Var operator+(const Var& a, double b) { return detail::make_unary(a.v + b, a, 1.0); }
inline Var operator+(double a, const Var& b) { return detail::make_unary(a + b.v, b, 1.0); }
inline Var operator-(const Var& a, double b) { return detail::make_unary(a.v - b, a, 1.0); }
inline Var operator-(double a, const Var& b) { return detail::make_unary(a - b.v, b, -1.0); }
inline Var operator*(const Var& a, double b) { return detail::make_unary(a.v * b, a, b); }
inline Var operator*(double a, const Var& b) { return detail::make_unary(a * b.v, b, a); }
inline Var operator/(const Var& a, double b) {
  if (b == 0.0) throw std::domain_error("division by zero");
  return detail::make_unary(a.v / b, a, 1.0 / b);
}
inline Var operator/(double a, const Var& b) { return Var(a) / b; }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

inline Var exp(const Var& a) { return detail::apply(Elementary::exp, a); }
inline Var log(const Var& a) { return detail::apply(Elementary::log, a); }
inline Var sin(const Var& a) { return detail::apply(Elementary::sin, a); }
inline Var cos(const Var& a) { return detail::apply(Elementary::cos, a); }
inline Var tanh(const Var& a) { return detail::apply(Elementary::tanh, a); }
inline Var elu(const Var& a) { return detail::apply(Elementary::elu, a); }
inline Var sqrt(const Var& a) {
  if (a.v == 0.0 && a.is_constant()) return Var(0.0);
  return detail::apply(Elementary::sqrt, a);
}
inline Var abs(const Var& a) { return detail::make_unary(std::abs(a.v), a, a.v < 0.0 ? -1.0 : 1.0); }

inline Var pow(const Var& a, double c) {
  const Derivs d = pow_derivs(a.v, c);
  return detail::make_unary(d[0], a, d[1]);
}

/// Real power with a differentiable exponent; the base must be positive unless
/// the exponent is a constant integer.
inline Var pow(const Var& a, const Var& c) {
  if (c.is_constant()) return pow(a, c.v);
  if (a.v <= 0.0) throw std::domain_error("pow: non-positive base with variable exponent");
  const double r = std::pow(a.v, c.v);
  return detail::make_binary(r, a, c.v * std::pow(a.v, c.v - 1.0), c, r * std::log(a.v));
}

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

/// d(loss)/d(param) for each param; params absent from the graph get 0.
inline std::vector<double> gradient(const Var& loss, std::span<const Var> params) {
  std::vector<double> out(params.size(), 0.0);
  if (loss.is_constant()) return out;
  const std::vector<double> adj = active_tape().adjoints(loss.id);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].is_constant() && params[i].id < adj.size()) out[i] = adj[params[i].id];
  }
  return out;
}

// Plain-double counterparts so generic code can call ad::sin(x) on any number type.
inline double exp(double a) { return std::exp(a); }
inline double log(double a) {
  if (a <= 0.0) throw std::domain_error("log: non-positive argument");
  return std::log(a);
}
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double tanh(double a) { return std::tanh(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double abs(double a) { return std::abs(a); }
inline double pow(double a, double c) {
  if (a < 0.0 && !detail::is_integer(c)) throw std::domain_error("pow: negative base with non-integer exponent");
  return std::pow(a, c);
}

}  // namespace lps::ad
