#pragma once

// Viscous Burgers equation u_t = nu u_xx - u u_x and its five point
// symmetries. Variables are ordered (x, t).

#include <vector>

#include "lps/pdes/heat.hpp"

namespace lps::pdes {

inline std::vector<sym::VectorField<2>> burgers_generators() {
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
      VF::make("v3", [=](const auto& x, const auto& u) {
        return field(x[1], constant_like(u, 0.0), constant_like(u, 1.0));
      }),
      VF::make("v4", [=](const auto& x, const auto& u) { return field(x[0], 2.0 * x[1], -u); }),
      VF::make("v5", [=](const auto& x, const auto& u) {
        const auto& xs = x[0];
        const auto& t = x[1];
        return field(t * xs, t * t, xs - t * u);
      }),
  };
}

inline PdeSystem<2> burgers(double nu) {
  auto residual = [nu](auto c) { return c[kUt] - nu * c[kUxx] + c[kU] * c[kUx]; };
  return PdeSystem<2>("burgers", 2, residual, burgers_generators(), {false, false, false, false, true}, {{"nu", nu}});
}

}  // namespace lps::pdes
