// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Usage: acceptance [criterion numbers...]   (default: all)
// LPS_DESK_ITERS overrides the iteration budget of the desk-scale runs.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lps/cli/commands.hpp"

namespace {

using namespace lps;
using ad::Jet;
using ad::Taylor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---- 1 -------------------------------------------------------------------

Outcome prolongation_oracle() {
  const double nu = 0.01;
  const auto v5 = pdes::heat_generators(nu).at(4);
  Rng rng(101);
  double err = 0;
  for (int k = 0; k < 100; ++k) {
    const auto j = sym::random_jet<2>(rng, 3, 2.0);
    const auto c = sym::prolong(v5, j, 2);
    const double x = j.point[0], ux = j.at({1, 0}), ut = j.at({0, 1}), uxx = j.at({2, 0});
    err = std::max({err, std::abs(c.phi({0, 1}) - (-x * ut - 2 * nu * ux)), std::abs(c.phi({2, 0}) - (-2 * ux - x * uxx))});
  }
  return {err <= 1e-10, fmt("max abs err %.3g over 100 jets", err)};
}

// ---- 2 -------------------------------------------------------------------

sym::VectorField<1> so2() {
  return sym::VectorField<1>::make("so2", [](const auto& x, const auto& u) {
    using X = std::decay_t<decltype(u)>;
    return sym::Coefficients<X, 1>{{-u}, x[0]};
  });
}

Outcome so2_oracle() {
  Rng rng(202);
  double e1 = 0, e2 = 0;
  for (int k = 0; k < 100; ++k) {
    const auto j = sym::random_jet<1>(rng, 2, 3.0);
    e1 = std::max(e1, std::abs(sym::prolong(so2(), j, 1).phi(1) - (1 + j[1] * j[1])));
  }
  auto residual = [](auto c) { return (c[1] - c[0]) * c[2] + c[1] + c[0]; };
  const pdes::PdeSystem<1> spiral("spiral", 1, residual, {so2()}, {true});
  for (int k = 0; k < 100; ++k) {
    const auto j = sym::random_jet<1>(rng, 2, 2.0);
    const double delta = (j[0] - j.point[0]) * j[1] + j[0] + j.point[0];
    e2 = std::max(e2, std::abs(sym::symmetry_residual<double>(spiral, so2(), j) - j[1] * delta));
  }
  return {e1 <= 1e-12 && e2 <= 1e-10, fmt("1+u_x^2 err %.3g, u_x*Delta err %.3g", e1, e2)};
}

// ---- 3 -------------------------------------------------------------------

Outcome infinitesimal_criterion() {
  const auto heat = pdes::heat(0.01);
  const auto hj = cli::analytic_jets("heat", 0.01, 303, 10, 100);
  double heat_worst = 0;
  bool ok = hj.size() == 1000;
  for (const auto& v : heat.generators()) {
    const auto r = sym::criterion_check<2>(heat, v, hj, 1e-6);
    heat_worst = std::max(heat_worst, r.max_abs_residual);
    ok = ok && r.pass;
  }

  const auto b = pdes::burgers(0.1);
  data::Grid g;
  g.T = 2.475;
  Rng rng(304);
  std::vector<Jet<double, 2>> bj;
  for (int i = 0; i < 5; ++i) {
    const data::GridJets gj(data::burgers_spectral_solve(data::sample_initial_condition(rng, g.L, {}), 0.1, g), g);
    for (int p = 0; p < 40; ++p)
      bj.push_back(gj.at(gj.first_time_index() + rng.index(gj.last_time_index() - gj.first_time_index() + 1),
                         rng.index(g.nx)));
  }
  double measured = 0, burgers_worst = 0;
  for (const auto& j : bj) measured = std::max(measured, std::abs(b.residual(j)));
  for (const auto& v : b.generators()) {
    const auto r = sym::criterion_check<2>(b, v, bj, 10 * measured);
    burgers_worst = std::max(burgers_worst, r.max_abs_residual);
    ok = ok && r.pass;
  }
  return {ok, fmt("heat max %.3g (tol 1e-6); burgers max %.3g (tol %.3g = 10x solver residual)", heat_worst,
                  burgers_worst, 10 * measured)};
}

// ---- 4 -------------------------------------------------------------------

Outcome classification() {
  using sym::GeneratorClass;
  using enum GeneratorClass;
  auto kinds = [](const cli::SymcheckReport& r) {
    std::vector<GeneratorClass> k;
    for (const auto& row : r.rows) k.push_back(row.kind);
    return k;
  };
  const auto heat = cli::symcheck(pdes::heat(0.01), "analytic", cli::analytic_jets("heat", 0.01, 0, 10, 100),
                                  std::nullopt, 0);

  auto bc = data::burgers_dataset_defaults();
  bc.n_train = 4;
  bc.n_val = 2;
  bc.n_test = 2;
  bc.n_collocation = 40;
  const auto d = data::build_dataset(bc);
  const auto burgers = cli::symcheck(pdes::burgers(0.1), "dataset", cli::dataset_jets(d, 0, 8, 50), std::nullopt, 0);

  const bool ok = kinds(heat) == std::vector{zero, zero, zero, delta_proportional, useful, useful} &&
                  kinds(burgers) == std::vector{zero, zero, zero, delta_proportional, useful} && heat.all_pass() &&
                  burgers.all_pass();
  std::string s = "heat:";
  for (const auto& r : heat.rows) s += " " + r.name + "=" + sym::to_string(r.kind);
  s += "; burgers:";
  for (const auto& r : burgers.rows) s += " " + r.name + "=" + sym::to_string(r.kind);
  return {ok, s};
}

// ---- 5 -------------------------------------------------------------------

Outcome gradient_integrity() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::string pde_name = seed % 2 ? "burgers" : "heat";
    auto dc = pde_name == "heat" ? data::heat_dataset_defaults() : data::burgers_dataset_defaults();
    dc.grid.nx = 32;
    dc.grid.nt = 12;
    dc.n_train = 2;
    dc.n_val = 1;
    dc.n_test = 1;
    dc.n_collocation = 6;
    dc.n_sensors = 8;
    dc.n_supervision = 12;
    dc.seed = seed;
    const auto d = data::build_dataset(dc);
    const auto pde = pdes::make_pde(pde_name, dc.nu);
    auto oc = nets::make_operator_config(d.sensor_x, 2, 16, 4);
    oc.seed = seed;
    const nets::OperatorModel m(oc);
    auto cfg = train::default_train_config(pde, "sym", dc.n_collocation);
    cfg.weights = {0.7, 1.3, 2.0};
    cfg.sym_form = seed % 4 < 2 ? train::SymForm::dot_squared : train::SymForm::abs_cosine;
    train::Trainer tr(m, d, pde, cfg);
    auto params = m.initial_parameters();
    const auto batch = tr.batch_for(1);
    const train::LossRequest all{true, true, true};
    const auto grad = tr.loss_and_gradient(params, batch, all).second;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i], h = 1e-6 * std::max(1.0, std::abs(keep));
      params[i] = keep + h;
      const double fp = tr.losses(params, batch, all).total;
      params[i] = keep - h;
      const double fm = tr.losses(params, batch, all).total;
      params[i] = keep;
      const double fd = (fp - fm) / (2 * h);
      num += (grad[i] - fd) * (grad[i] - fd);
      den += fd * fd;
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst < 1e-4, fmt("worst relative error %.3g over 20 seeds (heat and burgers, both sym forms)", worst)};
}

// ---- 6 -------------------------------------------------------------------

Outcome solver_validity() {
  Rng rng(606);
  data::Grid base;
  base.T = 2.475;
  base.nt = 12;
  double min_ratio = INFINITY, mass_drift = 0;
  for (int i = 0; i < 5; ++i) {
    const auto ic = data::sample_initial_condition(rng, base.L, {});
    auto solve = [&](std::size_t nx) {
      auto g = base;
      g.nx = nx;
      return data::burgers_spectral_solve(ic, 0.1, g);
    };
    std::vector<std::vector<double>> u;
    for (std::size_t nx : {16, 32, 64}) u.push_back(solve(nx));
    auto err = [&](std::size_t c, std::size_t nc) {
      double m = 0;
      for (std::size_t k = 0; k < base.nt; ++k)
        for (std::size_t j = 0; j < nc; ++j) m = std::max(m, std::abs(u[c][k * nc + j] - u[c + 1][k * 2 * nc + 2 * j]));
      return m;
    };
    min_ratio = std::min(min_ratio, err(0, 16) / err(1, 32));

    auto g = base;
    g.nx = 256;
    g.nt = 100;
    const auto full = data::burgers_spectral_solve(ic, 0.1, g);
    double m0 = 0;
    for (std::size_t j = 0; j < g.nx; ++j) m0 += full[j] * g.dx();
    for (std::size_t k = 1; k < g.nt; ++k) {
      double m = 0;
      for (std::size_t j = 0; j < g.nx; ++j) m += full[k * g.nx + j] * g.dx();
      mass_drift = std::max(mass_drift, std::abs(m - m0));
    }
  }
  return {min_ratio > 4 && mass_drift <= 1e-8,
          fmt("min error ratio per doubling %.3g (5 ICs), max mass drift %.3g", min_ratio, mass_drift)};
}

// ---- 7, 8 ----------------------------------------------------------------

std::size_t desk_iters() {
  if (const char* e = std::getenv("LPS_DESK_ITERS")) return std::stoul(e);
  return 5000;
}

io::json desk_config(std::uint64_t seed) {
  return {{"seed", seed},
          {"dataset", {{"pde", "heat"}, {"N_f", 20}, {"N_r", 200}}},
          {"model", {{"depth", 3}, {"width", 64}, {"embedding", 32}}},
          {"train", {{"max_iters", desk_iters()}}}};
}

double desk_run(std::uint64_t seed, const std::string& arm, std::optional<std::vector<std::string>> generators,
                const data::Dataset& d) {
  cli::Overrides o;
  o.arm = arm;
  o.generators = std::move(generators);
  const auto c = cli::resolve_config(desk_config(seed), o);
  const auto pde = pdes::make_pde(d.config.pde, d.config.nu);
  const nets::OperatorModel model(cli::operator_config(c, d.sensor_x));
  train::Trainer tr(model, d, pde, c.train);
  auto s = tr.initial_state(model.initial_parameters());
  tr.run(s);
  return train::evaluate_mse(model, s.best_params, d, "test").mean;
}

struct DeskResults {
  std::vector<double> sym, baseline, k0;
  bool done = false;
};

DeskResults& desk() {
  static DeskResults r;
  if (r.done) return r;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto d = data::build_dataset(cli::resolve_config(desk_config(seed)).dataset);
    r.sym.push_back(desk_run(seed, "sym", std::nullopt, d));
    r.baseline.push_back(desk_run(seed, "baseline", std::nullopt, d));
    r.k0.push_back(desk_run(seed, "sym", std::vector<std::string>{"v4"}, d));
    std::printf("  seed %llu: sym %.4g  baseline %.4g  K=0 %.4g\n", static_cast<unsigned long long>(seed), r.sym.back(),
                r.baseline.back(), r.k0.back());
    std::fflush(stdout);
  }
  r.done = true;
  return r;
}

Outcome low_data() {
  const auto& r = desk();
  const double s = median3(r.sym), b = median3(r.baseline);
  return {s < b, fmt("median test MSE sym %.4g vs baseline %.4g (%zu iterations, 3 seeds)", s, b, desk_iters())};
}

Outcome symmetry_count() {
  const auto& r = desk();
  const double k2 = median3(r.sym), k0 = median3(r.k0);
  return {k2 < k0, fmt("median test MSE K=2 {v5,v6} %.4g vs K=0 {v4} %.4g", k2, k0)};
}

// ---- 9 -------------------------------------------------------------------

class ExactHeatPredictor {
 public:
  explicit ExactHeatPredictor(const data::Dataset& d) : d_(d) {}
  std::vector<double> supervision(std::size_t ic) const {
    std::vector<double> out;
    for (std::size_t p = 0; p < d_.sup_x.size(); ++p)
      out.push_back(data::heat_exact(d_.train[ic].ic, d_.config.nu, d_.sup_t[p], d_.sup_x[p]));
    return out;
  }
  Jet<double, 2> jet(std::size_t ic, double t, double x, int order) const {
    return ad::jet_of<double, 2>(
        [&](const std::array<Taylor<double, 2>, 2>& s) {
          return data::heat_exact(d_.train[ic].ic, d_.config.nu, s[1], s[0]);
        },
        {x, t}, order);
  }

 private:
  const data::Dataset& d_;
};

Outcome fixed_point() {
  auto dc = data::heat_dataset_defaults();
  dc.n_train = 8;
  dc.n_val = 0;
  dc.n_test = 0;
  dc.n_collocation = 400;
  dc.seed = 909;
  const auto d = data::build_dataset(dc);
  const auto heat = pdes::heat(dc.nu);
  const auto gens = train::select_generators(heat, {"v4", "v5", "v6"});
  const ExactHeatPredictor p(d);
  Rng rng(910);
  double worst = 0;
  for (int trial = 0; trial < 6; ++trial) {
    train::CollocationBatch b = train::full_batch(d);
    if (trial > 0)
      for (auto& grp : b.groups) {
        const std::size_t keep = 1 + rng.index(grp.points.size());
        grp.points.resize(keep);
      }
    for (auto form : {train::SymForm::dot_squared, train::SymForm::abs_cosine}) {
      const auto t = train::assemble_losses<double>(p, d, b, heat, gens, form, {1.0, 1.0, 1.0});
      worst = std::max({worst, t.pde, t.data, t.sym});
    }
  }
  return {worst <= 1e-8, fmt("largest loss component %.3g over 6 batches", worst)};
}

// ---- 10 ------------------------------------------------------------------

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "lps_acceptance_repro";
  fs::remove_all(root);
  auto config = desk_config(10);
  config["train"]["max_iters"] = 200;
  std::ostringstream log;
  std::array<std::string, 2> history, metrics, dataset;
  for (int rep = 0; rep < 2; ++rep) {
    cli::Overrides o;
    o.output_dir = (root / std::to_string(rep)).string();
    const auto c = cli::resolve_config(config, o);
    const auto data_path = cli::cmd_generate(c, log);
    const auto run = cli::cmd_train(c, data_path, false, log);
    const auto out = (root / std::to_string(rep) / "metrics.json").string();
    cli::cmd_eval(run.best_path, data_path, "test", out, log);
    history[rep] = io::read_file(run.history_path);
    metrics[rep] = io::read_file(out);
    dataset[rep] = io::read_file(data_path);
  }
  fs::remove_all(root);
  const bool ok = history[0] == history[1] && metrics[0] == metrics[1] && dataset[0] == dataset[1] &&
                  !history[0].empty();
  return {ok, fmt("history %s, metrics %s, dataset %s", history[0] == history[1] ? "identical" : "DIFFER",
                  metrics[0] == metrics[1] ? "identical" : "DIFFER", dataset[0] == dataset[1] ? "identical" : "DIFFER")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "prolongation oracle", prolongation_oracle},
      {2, "SO(2) oracle", so2_oracle},
      {3, "infinitesimal criterion", infinitesimal_criterion},
      {4, "generator classification", classification},
      {5, "gradient integrity", gradient_integrity},
      {6, "solver validity", solver_validity},
      {7, "directional low-data result", low_data},
      {8, "symmetry-count monotonicity", symmetry_count},
      {9, "fixed-point property", fixed_point},
      {10, "reproducibility", reproducibility},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
