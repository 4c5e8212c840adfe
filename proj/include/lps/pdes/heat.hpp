#pragma once

// Heat equation u_t = nu u_xx and its six-dimensional point symmetry algebra
// (modulo the infinite-dimensional superposition part). Variables are ordered
// (x, t) as in the jet layout.

#include <span>
#include <vector>

#include "lps/pdes/pde_system.hpp"

namespace lps::pdes {

// Jet-space coordinate positions for P = 2, variables (x, t).
inline constexpr std::size_t kX = 0, kT = 1, kU = 2, kUx = 3, kUt = 4, kUxx = 5, kUxt = 6, kUtt = 7;

inline std::vector<sym::VectorField<2>> heat_generators(double nu) {
  using sym::constant_like;
  using VF = sym::VectorField<2>;
  auto field = [](const auto& xi_x, const auto& xi_t, const auto& phi) {
    using X = std::decay_t<decltype(phi)>;
    return sym::Coefficients<X, 2>{{xi_x, xi_t}, phi};
  };
  return {
      VF::make("v1", [=](const auto&, const auto& u) {
        return field(constant_like(u, 1.0), constant_like(u, 0.0), constant_like(u, 0.0));
      }),
      VF::make("v2", [=](const auto&, const auto& u) {
        return field(constant_like(u, 0.0), constant_like(u, 1.0), constant_like(u, 0.0));
      }),
      VF::make("v3", [=](const auto&, const auto& u) {
        return field(constant_like(u, 0.0), constant_like(u, 0.0), constant_like(u, 1.0));
      }),
      VF::make("v4", [=](const auto& x, const auto& u) {
        return field(x[0], 2.0 * x[1], constant_like(u, 0.0));
      }),
      VF::make("v5", [=](const auto& x, const auto& u) {
        return field(2.0 * nu * x[1], constant_like(u, 0.0), -(x[0] * u));
      }),
      VF::make("v6", [=](const auto& x, const auto& u) {
        const auto& xs = x[0];
        const auto& t = x[1];
        return field(4.0 * nu * (t * xs), 4.0 * nu * (t * t), -((xs * xs + 2.0 * nu * t) * u));
      }),
  };
}

inline PdeSystem<2> heat(double nu) {
  auto residual = [nu](auto c) { return c[kUt] - nu * c[kUxx]; };
  return PdeSystem<2>("heat", 2, residual, heat_generators(nu), {false, false, false, false, true, true},
                      {{"nu", nu}});
}

}  // namespace lps::pdes
