#pragma once

// Graded lexicographic layout of multi-indices over P independent variables.
//
// A multi-index is stored as an exponent vector alpha (alpha_i = number of
// derivatives taken in variable i). Entries are grouped by total degree; within
// a degree the first variable's exponent decreases. For P = 2 with variables
// (x, t) the layout is
//
//   u, u_x, u_t, u_xx, u_xt, u_tt, u_xxx, u_xxt, u_xtt, u_ttt, ...
//
// The position of a multi-index does not depend on the truncation order, so a
// layout of order n is a prefix of the layout of order n + 1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/elementary.hpp"

namespace lps::ad {

constexpr std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <std::size_t P>
using Exponent = std::array<std::uint8_t, P>;

template <std::size_t P>
struct MultiIndexLayout {
  static_assert(P >= 1 && P <= 3, "layouts are provided for 1 to 3 independent variables");

  /// Number of multi-indices with total degree <= order.
  static constexpr std::size_t count(int order) { return order < 0 ? 0 : binomial(P + order, P); }

  static constexpr std::size_t kCapacity = count(kMaxJetOrder);
  static constexpr std::size_t kLookup = [] {
    std::size_t n = 1;
    for (std::size_t i = 0; i < P; ++i) n *= (kMaxJetOrder + 1);
    return n;
  }();

  static constexpr std::array<Exponent<P>, kCapacity> kExponents = [] {
    std::array<Exponent<P>, kCapacity> out{};
    std::size_t k = 0;
    for (int d = 0; d <= kMaxJetOrder; ++d) {
      // Enumerate compositions of d in lexicographically descending order.
      Exponent<P> a{};
      a[0] = static_cast<std::uint8_t>(d);
      while (true) {
        out[k++] = a;
        // Next composition: find rightmost position (excluding last) with a nonzero entry.
        int i = static_cast<int>(P) - 2;
        while (i >= 0 && a[i] == 0) --i;
        if (i < 0) break;
        a[i] -= 1;
        int rest = 0;
        for (std::size_t j = i + 1; j < P; ++j) {
          rest += a[j];
          a[j] = 0;
        }
        a[i + 1] = static_cast<std::uint8_t>(rest + 1);
      }
    }
    return out;
  }();

  static constexpr std::size_t code(const Exponent<P>& a) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < P; ++i) c = c * (kMaxJetOrder + 1) + a[i];
    return c;
  }

  static constexpr std::array<std::int16_t, kLookup> kIndexOf = [] {
    std::array<std::int16_t, kLookup> t{};
    for (auto& v : t) v = -1;
    for (std::size_t k = 0; k < kCapacity; ++k) t[code(kExponents[k])] = static_cast<std::int16_t>(k);
    return t;
  }();

  static constexpr int degree(std::size_t k) {
    int d = 0;
    for (auto e : kExponents[k]) d += e;
    return d;
  }

  static constexpr int degree_of(const Exponent<P>& a) {
    int d = 0;
    for (auto e : a) d += e;
    return d;
  }

  static constexpr std::size_t index(const Exponent<P>& a) {
    if (degree_of(a) > kMaxJetOrder) throw std::out_of_range("multi-index exceeds the maximum jet order");
    return static_cast<std::size_t>(kIndexOf[code(a)]);
  }

  /// Position of the multi-index obtained by adding one derivative in variable i.
  static constexpr std::size_t shifted(std::size_t k, std::size_t i) {
    Exponent<P> a = kExponents[k];
    a[i] += 1;
    return index(a);
  }

  /// alpha! = prod_i alpha_i!
  static constexpr double factorial(std::size_t k) {
    double f = 1.0;
    for (auto e : kExponents[k])
      for (int j = 2; j <= e; ++j) f *= j;
    return f;
  }

  // Product plan: for each output position k of a truncated product of
  // order m, the list of (i, j) with alpha_i + alpha_j = alpha_k.
  struct ProductPlan {
    std::vector<std::uint32_t> begin;  // size count(m) + 1
    std::vector<std::uint8_t> lhs;
    std::vector<std::uint8_t> rhs;
  };

  static const ProductPlan& plan(int order) {
    static const std::array<ProductPlan, kMaxJetOrder + 1> plans = [] {
      std::array<ProductPlan, kMaxJetOrder + 1> out;
      for (int m = 0; m <= kMaxJetOrder; ++m) {
        ProductPlan& p = out[m];
        const std::size_t n = count(m);
        p.begin.push_back(0);
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t i = 0; i < n; ++i) {
            bool fits = true;
            Exponent<P> rest{};
            for (std::size_t v = 0; v < P; ++v) {
              if (kExponents[i][v] > kExponents[k][v]) {
                fits = false;
                break;
              }
              rest[v] = static_cast<std::uint8_t>(kExponents[k][v] - kExponents[i][v]);
            }
            if (!fits) continue;
            p.lhs.push_back(static_cast<std::uint8_t>(i));
            p.rhs.push_back(static_cast<std::uint8_t>(index(rest)));
          }
          p.begin.push_back(static_cast<std::uint32_t>(p.lhs.size()));
        }
      }
      return out;
    }();
    if (order < 0 || order > kMaxJetOrder) throw std::out_of_range("jet order outside [0, 4]");
    return plans[order];
  }
};

}  // namespace lps::ad
