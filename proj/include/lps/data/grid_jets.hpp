#pragma once

// Jets of a numerical solution stored on a grid: spatial derivatives are
// spectral (periodic rows), time derivatives use five-point central
// differences on the output times, so jets exist for 2 <= k <= nt - 3.

#include <array>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/jet.hpp"
#include "lps/data/fft.hpp"
#include "lps/data/initial_condition.hpp"

namespace lps::data {

class GridJets {
 public:
  GridJets(const std::vector<double>& u, const Grid& g) : g_(g) {
    if (u.size() != g.nt * g.nx) throw std::invalid_argument("GridJets: solution does not match the grid");
    if (g.nt < 5) throw std::invalid_argument("GridJets: need at least five time rows");
    RealFft fft(g.nx);
    for (int d = 0; d < 4; ++d) {
      dx_[d].resize(u.size());
      for (std::size_t k = 0; k < g.nt; ++k) {
        std::span<const double> row(u.data() + k * g.nx, g.nx);
        const auto r = d == 0 ? std::vector<double>(row.begin(), row.end()) : spectral_derivative(fft, row, g.L, d);
        std::copy(r.begin(), r.end(), dx_[d].begin() + static_cast<std::ptrdiff_t>(k * g.nx));
      }
    }
  }

  std::size_t first_time_index() const noexcept { return 2; }
  std::size_t last_time_index() const noexcept { return g_.nt - 3; }

  /// Order-3 jet at (x_j, t_k).
  ad::Jet<double, 2> at(std::size_t k, std::size_t j) const {
    if (k < first_time_index() || k > last_time_index() || j >= g_.nx)
      throw std::out_of_range("GridJets::at: node outside the differentiable interior");
    const double h = g_.dt();
    auto f = [&](int dxo, int off) { return dx_[dxo][(k + off) * g_.nx + j]; };
    auto d1 = [&](int dxo) { return (f(dxo, -2) - 8 * f(dxo, -1) + 8 * f(dxo, 1) - f(dxo, 2)) / (12 * h); };
    auto d2 = [&](int dxo) {
      return (-f(dxo, -2) + 16 * f(dxo, -1) - 30 * f(dxo, 0) + 16 * f(dxo, 1) - f(dxo, 2)) / (12 * h * h);
    };
    auto d3 = [&](int dxo) { return (-f(dxo, -2) + 2 * f(dxo, -1) - 2 * f(dxo, 1) + f(dxo, 2)) / (2 * h * h * h); };

    ad::Jet<double, 2> jet({g_.x(j), g_.t(k)}, 3);
    jet.at({0, 0}) = f(0, 0);
    jet.at({1, 0}) = f(1, 0);
    jet.at({0, 1}) = d1(0);
    jet.at({2, 0}) = f(2, 0);
    jet.at({1, 1}) = d1(1);
    jet.at({0, 2}) = d2(0);
    jet.at({3, 0}) = f(3, 0);
    jet.at({2, 1}) = d1(2);
    jet.at({1, 2}) = d2(1);
    jet.at({0, 3}) = d3(0);
    return jet;
  }

 private:
  Grid g_;
  std::array<std::vector<double>, 4> dx_;
};

}  // namespace lps::data
