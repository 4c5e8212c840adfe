#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <vector>

#include "lps/autodiff.hpp"
#include "lps/data.hpp"
#include "lps/pdes.hpp"
#include "lps/symmetry.hpp"

namespace lps::data {
namespace {

using ad::Jet;
using ad::Taylor;

InitialCondition single_mode(double A, int l, double phi, double L = 2 * std::numbers::pi) {
  InitialCondition ic;
  ic.L = L;
  ic.A = {A};
  ic.l = {l};
  ic.phi = {phi};
  return ic;
}

InitialCondition scaled(InitialCondition ic, double s) {
  for (double& a : ic.A) a *= s;
  return ic;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(InitialCondition, SingleModeIsSine) {
  const auto ic = single_mode(1.0, 1, 0.0, 3.0);
  for (double x : {0.0, 0.3, 1.1, 2.9}) EXPECT_DOUBLE_EQ(ic(x), std::sin(2 * std::numbers::pi * x / 3.0));
}

TEST(InitialCondition, PeriodicAndDeterministic) {
  Rng a(11), b(11);
  for (int k = 0; k < 100; ++k) {
    const auto ic = sample_initial_condition(a, 2 * std::numbers::pi, {});
    const auto again = sample_initial_condition(b, 2 * std::numbers::pi, {});
    EXPECT_EQ(ic.A, again.A);
    EXPECT_EQ(ic.l, again.l);
    EXPECT_EQ(ic.phi, again.phi);
    EXPECT_NEAR(ic(0.0), ic(2 * std::numbers::pi), 1e-12);
    ASSERT_EQ(ic.K(), 10u);
    for (std::size_t i = 0; i < ic.K(); ++i) {
      EXPECT_GE(ic.A[i], -0.5);
      EXPECT_LT(ic.A[i], 0.5);
      EXPECT_GE(ic.l[i], 1);
      EXPECT_LE(ic.l[i], 3);
      EXPECT_GE(ic.phi[i], 0.0);
      EXPECT_LT(ic.phi[i], 2 * std::numbers::pi);
    }
  }
}

TEST(InitialCondition, RejectsEmptyRanges) {
  Rng rng(1);
  IcSampling s;
  s.K = 0;
  EXPECT_THROW(sample_initial_condition(rng, 1.0, s), std::invalid_argument);
  s = {};
  s.l_min = 4;
  EXPECT_THROW(sample_initial_condition(rng, 1.0, s), std::invalid_argument);
  s = {};
  s.amplitude = {1.0, -1.0};
  EXPECT_THROW(sample_initial_condition(rng, 1.0, s), std::invalid_argument);
}

TEST(HeatExact, InitialTimeAndDecay) {
  Rng rng(2);
  const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
  for (double x : {0.0, 0.7, 3.3}) EXPECT_EQ(heat_exact(ic, 0.01, 0.0, x), ic(x));
  const auto m = single_mode(0.8, 2, 0.4);
  const double x = 0.3, t = 40.0, nu = 0.01;
  EXPECT_NEAR(heat_exact(m, nu, t, x) / heat_exact(m, nu, 0.0, x), std::exp(-nu * 4 * t), 1e-14);
}

TEST(HeatExact, FiniteDifferenceResidual) {
  const double nu = 0.01;
  for (int l = 1; l <= 3; ++l) {
    const auto ic = single_mode(0.5, l, 0.3);
    for (double t : {0.5, 4.0, 12.0}) {
      for (double x : {0.2, 1.9, 5.0}) {
        const double ht = 1e-2, hx = 1e-2;
        auto u = [&](double dt, double dx) { return heat_exact(ic, nu, t + dt, x + dx); };
        const double ut = (u(-2 * ht, 0) - 8 * u(-ht, 0) + 8 * u(ht, 0) - u(2 * ht, 0)) / (12 * ht);
        const double uxx =
            (-u(0, -2 * hx) + 16 * u(0, -hx) - 30 * u(0, 0) + 16 * u(0, hx) - u(0, 2 * hx)) / (12 * hx * hx);
        EXPECT_LE(std::abs(ut - nu * uxx), 1e-8);
      }
    }
  }
}

TEST(HeatExact, AllGeneratorsPassCriterion) {
  const double nu = 0.01;
  const auto heat = pdes::heat(nu);
  Rng rng(3);
  std::vector<Jet<double, 2>> jets;
  for (int i = 0; i < 5; ++i) {
    const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
    for (int p = 0; p < 20; ++p)
      jets.push_back(ad::jet_of<double, 2>(
          [&](const std::array<Taylor<double, 2>, 2>& s) { return heat_exact(ic, nu, s[1], s[0]); },
          {rng.uniform(0, 2 * std::numbers::pi), rng.uniform(0, 16)}, 3));
  }
  for (const auto& v : heat.generators()) {
    const auto r = sym::criterion_check<2>(heat, v, jets, 1e-6);
    EXPECT_TRUE(r.pass) << v.name() << " " << r.max_abs_residual;
  }
}

TEST(SpectralDerivative, MatchesAnalytic) {
  const std::size_t n = 64;
  const double L = 3.0;
  RealFft fft(n);
  std::vector<double> u(n);
  const double k = 2 * std::numbers::pi * 3 / L;
  for (std::size_t j = 0; j < n; ++j) u[j] = std::sin(k * L * j / n);
  for (int d = 1; d <= 3; ++d) {
    const auto du = spectral_derivative(fft, u, L, d);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = L * j / n;
      const double want = d == 1 ? k * std::cos(k * x) : d == 2 ? -k * k * std::sin(k * x) : -k * k * k * std::cos(k * x);
      EXPECT_NEAR(du[j], want, 1e-12 * std::pow(k, d));
    }
  }
}

Grid burgers_grid(std::size_t nx = 256, std::size_t nt = 100) {
  Grid g;
  g.T = 2.475;
  g.nx = nx;
  g.nt = nt;
  return g;
}

TEST(BurgersSolver, ZeroStaysZero) {
  InitialCondition ic = single_mode(0.0, 1, 0.0);
  for (double v : burgers_spectral_solve(ic, 0.1, burgers_grid())) EXPECT_EQ(v, 0.0);
}

TEST(BurgersSolver, ApproachesHeatForSmallAmplitude) {
  Rng rng(4);
  const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
  const Grid g = burgers_grid(128, 50);
  double prev = 0;
  for (int h = 0; h < 4; ++h) {
    const auto small = scaled(ic, std::pow(0.5, h + 2));
    const double gap = max_abs_diff(burgers_spectral_solve(small, 0.5, g), heat_grid(small, 0.5, g));
    if (h > 0) {
      EXPECT_NEAR(prev / gap, 4.0, 0.4) << h;  // gap is quadratic in the amplitude
      EXPECT_GT(prev / gap, 2.0);
    }
    prev = gap;
  }
}

TEST(BurgersSolver, SpectralSelfConvergence) {
  Rng rng(5);
  IcSampling s;
  s.amplitude = {-0.25, 0.25};
  const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, s);
  auto solve = [&](std::size_t nx) { return burgers_spectral_solve(ic, 0.1, burgers_grid(nx, 12)); };
  const auto u16 = solve(16), u32 = solve(32), u64 = solve(64);
  auto err = [](const std::vector<double>& coarse, const std::vector<double>& fine, std::size_t nc) {
    double m = 0;
    for (std::size_t k = 0; k < coarse.size() / nc; ++k)
      for (std::size_t j = 0; j < nc; ++j) m = std::max(m, std::abs(coarse[k * nc + j] - fine[k * 2 * nc + 2 * j]));
    return m;
  };
  const double e1 = err(u16, u32, 16), e2 = err(u32, u64, 32);
  EXPECT_GT(e1 / e2, 4.0) << e1 << " " << e2;
}

TEST(BurgersSolver, ConservesMass) {
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
    const Grid g = burgers_grid();
    const auto u = burgers_spectral_solve(ic, 0.1, g);
    double m0 = 0;
    for (std::size_t j = 0; j < g.nx; ++j) m0 += u[j] * g.dx();
    for (std::size_t k = 1; k < g.nt; ++k) {
      double m = 0;
      for (std::size_t j = 0; j < g.nx; ++j) m += u[k * g.nx + j] * g.dx();
      EXPECT_NEAR(m, m0, 1e-8);
    }
  }
}

// max |u_t + u u_x - nu u_xx| at interior nodes with fourth-order central differences
double fd_residual(const std::vector<double>& u, const Grid& g, double nu) {
  const std::size_t nx = g.nx;
  auto at = [&](std::size_t k, std::ptrdiff_t j) { return u[k * nx + static_cast<std::size_t>((j + nx) % nx)]; };
  const double hx = g.dx(), ht = g.dt();
  double m = 0;
  for (std::size_t k = 2; k + 2 < g.nt; ++k) {
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(nx); ++j) {
      const double ux = (at(k, j - 2) - 8 * at(k, j - 1) + 8 * at(k, j + 1) - at(k, j + 2)) / (12 * hx);
      const double uxx =
          (-at(k, j - 2) + 16 * at(k, j - 1) - 30 * at(k, j) + 16 * at(k, j + 1) - at(k, j + 2)) / (12 * hx * hx);
      const double ut = (at(k - 2, j) - 8 * at(k - 1, j) + 8 * at(k + 1, j) - at(k + 2, j)) / (12 * ht);
      m = std::max(m, std::abs(ut + at(k, j) * ux - nu * uxx));
    }
  }
  return m;
}

TEST(BurgersSolver, FiniteDifferenceResidualShrinksWithRefinement) {
  Rng rng(7);
  const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
  const double coarse = fd_residual(burgers_spectral_solve(ic, 0.1, burgers_grid(64, 51)), burgers_grid(64, 51), 0.1);
  const double fine = fd_residual(burgers_spectral_solve(ic, 0.1, burgers_grid(128, 101)), burgers_grid(128, 101), 0.1);
  EXPECT_LT(fine, coarse / 4) << coarse << " " << fine;
  EXPECT_LT(fine, 1e-2);
}

TEST(BurgersSolver, DetectsBlowUp) {
  const auto ic = single_mode(0.5, 3, 0.0);
  try {
    burgers_spectral_solve(ic, -5.0, burgers_grid(64, 20));
    FAIL() << "expected blow-up";
  } catch (const SolverBlowUp& e) {
    EXPECT_NE(std::string(e.what()).find("blew up"), std::string::npos);
  }
}

TEST(BurgersSolver, RejectsBadGrids) {
  const auto ic = single_mode(0.5, 1, 0.0);
  EXPECT_THROW(burgers_spectral_solve(ic, 0.1, burgers_grid(100, 20)), std::invalid_argument);
  Grid g = burgers_grid(64, 20);
  g.periodic = false;
  EXPECT_THROW(burgers_spectral_solve(ic, 0.1, g), std::invalid_argument);
}

TEST(GridJets, HeatJetsMatchAnalytic) {
  Rng rng(8);
  const auto ic = sample_initial_condition(rng, 2 * std::numbers::pi, {});
  const Grid g;
  const GridJets jets(heat_grid(ic, 0.01, g), g);
  for (std::size_t k : {2ul, 50ul, 96ul}) {
    for (std::size_t j : {0ul, 77ul, 255ul}) {
      const auto got = jets.at(k, j);
      const auto want = ad::jet_of<double, 2>(
          [&](const std::array<Taylor<double, 2>, 2>& s) { return heat_exact(ic, 0.01, s[1], s[0]); },
          {g.x(j), g.t(k)}, 3);
      for (std::size_t i = 0; i < want.partials.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-6) << i;
    }
  }
  EXPECT_THROW(jets.at(1, 0), std::out_of_range);
  EXPECT_THROW(jets.at(98, 0), std::out_of_range);
}

TEST(GridJets, BurgersGeneratorsPassAtSolverTolerance) {
  const double nu = 0.1;
  const auto b = pdes::burgers(nu);
  Rng rng(9);
  const Grid g = burgers_grid();
  std::vector<Jet<double, 2>> jets;
  for (int i = 0; i < 3; ++i) {
    const GridJets gj(burgers_spectral_solve(sample_initial_condition(rng, g.L, {}), nu, g), g);
    for (int p = 0; p < 30; ++p) jets.push_back(gj.at(2 + rng.index(g.nt - 4), rng.index(g.nx)));
  }
  double measured = 0;
  for (const auto& j : jets) measured = std::max(measured, std::abs(b.residual(j)));
  EXPECT_LT(measured, 1e-3);
  for (const auto& v : b.generators())
    EXPECT_TRUE(sym::criterion_check<2>(b, v, jets, 10 * measured).pass) << v.name();
}

DatasetConfig small_config(const std::string& pde = "heat") {
  DatasetConfig c = pde == "heat" ? heat_dataset_defaults() : burgers_dataset_defaults();
  c.grid.nx = 32;
  c.grid.nt = 20;
  c.n_train = 3;
  c.n_val = 2;
  c.n_test = 2;
  c.n_collocation = 40;
  c.n_sensors = 16;
  c.n_supervision = 25;
  c.seed = 42;
  return c;
}

void expect_same(const std::vector<IcRecord>& a, const std::vector<IcRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].ic.A, b[i].ic.A);
    EXPECT_EQ(a[i].ic.l, b[i].ic.l);
    EXPECT_EQ(a[i].ic.phi, b[i].ic.phi);
    EXPECT_EQ(a[i].sensors, b[i].sensors);
    EXPECT_EQ(a[i].reference, b[i].reference);
    EXPECT_EQ(a[i].sup_u, b[i].sup_u);
    EXPECT_EQ(a[i].col_x, b[i].col_x);
    EXPECT_EQ(a[i].col_t, b[i].col_t);
  }
}

void expect_same(const Dataset& a, const Dataset& b) {
  EXPECT_EQ(to_json(a.config), to_json(b.config));
  EXPECT_EQ(a.sensor_x, b.sensor_x);
  EXPECT_EQ(a.sup_x, b.sup_x);
  EXPECT_EQ(a.sup_t, b.sup_t);
  expect_same(a.train, b.train);
  expect_same(a.val, b.val);
  expect_same(a.test, b.test);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lps_data_test_" + name)).string();
}

TEST(Dataset, Defaults) {
  const auto h = heat_dataset_defaults();
  EXPECT_DOUBLE_EQ(h.grid.L, 2 * std::numbers::pi);
  EXPECT_EQ(h.grid.T, 16.0);
  EXPECT_EQ(h.grid.nx, 256u);
  EXPECT_EQ(h.grid.nt, 100u);
  EXPECT_EQ(h.nu, 0.01);
  EXPECT_EQ(h.n_sensors, 200u);
  EXPECT_EQ(h.n_supervision, 300u);
  EXPECT_EQ(h.n_train, 100u);
  EXPECT_EQ(h.n_val, 100u);
  EXPECT_EQ(h.n_test, 300u);
  const auto b = burgers_dataset_defaults();
  EXPECT_EQ(b.grid.T, 2.475);
  EXPECT_EQ(b.nu, 0.1);
  EXPECT_EQ(b.n_train, 500u);
  EXPECT_EQ(b.n_collocation, 5000u);
}

TEST(Dataset, StructuralInvariants) {
  for (const std::string pde : {"heat", "burgers"}) {
    const auto c = small_config(pde);
    const auto d = build_dataset(c);
    ASSERT_EQ(d.sup_x.size(), c.n_supervision);
    std::set<std::size_t> ids;
    std::size_t total_col = 0;
    for (const auto* split : {&d.train, &d.val, &d.test})
      for (const auto& r : *split) {
        EXPECT_TRUE(ids.insert(r.id).second);
        ASSERT_EQ(r.sensors.size(), c.n_sensors);
        for (std::size_t i = 0; i < c.n_sensors; ++i) EXPECT_EQ(r.sensors[i], r.ic(d.sensor_x[i]));
        EXPECT_EQ(r.reference.size(), c.grid.nt * c.grid.nx);
      }
    EXPECT_EQ(ids.size(), 7u);
    for (const auto& r : d.train) {
      total_col += r.col_x.size();
      std::set<std::pair<double, double>> seen;
      for (std::size_t i = 0; i < r.col_x.size(); ++i) {
        EXPECT_GT(r.col_x[i], 0.0);
        EXPECT_LT(r.col_x[i], c.grid.L);
        EXPECT_GT(r.col_t[i], 0.0);
        EXPECT_LT(r.col_t[i], c.grid.T);
        EXPECT_TRUE(seen.insert({r.col_x[i], r.col_t[i]}).second);
      }
      ASSERT_EQ(r.sup_u.size(), c.n_supervision);
      for (std::size_t i = 0; i < c.n_sensors; ++i) {
        EXPECT_EQ(d.sup_t[i], 0.0);
        EXPECT_EQ(r.sup_u[i], r.sensors[i]);
      }
      for (std::size_t i = c.n_sensors; i < c.n_supervision; ++i) {
        EXPECT_TRUE(d.sup_x[i] == 0.0 || d.sup_x[i] == c.grid.L);
        EXPECT_GT(d.sup_t[i], 0.0);
        if (pde == "heat") {
          EXPECT_NEAR(r.sup_u[i], heat_exact(r.ic, c.nu, d.sup_t[i], d.sup_x[i]), 1e-12);
        }
      }
    }
    EXPECT_EQ(total_col, c.n_collocation);
    EXPECT_EQ(d.train[0].col_x.size(), 14u);
    EXPECT_EQ(d.train[2].col_x.size(), 13u);
  }
}

TEST(Dataset, SupervisionOnlyConfig) {
  auto c = small_config();
  c.n_train = 1;
  c.n_collocation = 0;
  const auto d = build_dataset(c);
  ASSERT_EQ(d.train.size(), 1u);
  EXPECT_TRUE(d.train[0].col_x.empty());
  EXPECT_EQ(d.train[0].sup_u.size(), c.n_supervision);
}

TEST(Dataset, Validation) {
  auto c = small_config();
  c.n_collocation = c.n_train * (c.grid.nx - 1) * (c.grid.nt - 2) + 1;
  EXPECT_THROW(build_dataset(c), std::invalid_argument);
  c = small_config();
  c.n_supervision = c.n_sensors - 1;
  EXPECT_THROW(build_dataset(c), std::invalid_argument);
  c = small_config("burgers");
  c.grid.nx = 48;
  EXPECT_THROW(build_dataset(c), std::invalid_argument);
  EXPECT_THROW(build_dataset(small_config()).split("holdout"), std::invalid_argument);
}

TEST(Dataset, RoundTripAndRegeneration) {
  const auto d = build_dataset(small_config("burgers"));
  const auto path = temp_path("roundtrip.lps");
  save_dataset(d, path);
  const auto loaded = load_dataset(path);
  expect_same(d, loaded);
  const auto blob = io::load_blob(path);
  EXPECT_EQ(blob.meta.at("seed").get<std::uint64_t>(), 42u);
  expect_same(build_dataset(loaded.config), loaded);
  auto other = small_config("burgers");
  other.seed = 43;
  EXPECT_NE(build_dataset(other).train[0].ic.A, d.train[0].ic.A);
  std::filesystem::remove(path);
}

TEST(Dataset, TruncatedFileIsRejected) {
  const auto path = temp_path("trunc.lps");
  save_dataset(build_dataset(small_config()), path);
  const auto size = std::filesystem::file_size(path);
  for (auto keep : {size - 1, size / 2, std::uintmax_t{20}}) {
    std::filesystem::resize_file(path, keep);
    EXPECT_THROW(load_dataset(path), io::FormatError) << keep;
  }
  std::filesystem::remove(path);
}

TEST(Dataset, IcStreamsAreOrderIndependent) {
  auto c = small_config();
  const auto d = build_dataset(c);
  c.n_val = 0;
  c.n_test = 0;
  c.n_train = 5;
  c.n_collocation = 0;
  const auto wider = build_dataset(c);
  // the same global index draws the same initial condition regardless of the split sizes
  EXPECT_EQ(wider.train[3].ic.A, d.val[0].ic.A);
  EXPECT_EQ(wider.train[4].ic.phi, d.val[1].ic.phi);
}

}  // namespace
}  // namespace lps::data
