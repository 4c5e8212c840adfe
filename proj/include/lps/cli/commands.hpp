#pragma once

// Subcommand implementations. Each writes its outputs under a run directory
// together with the resolved configuration it used.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lps/autodiff.hpp"
#include "lps/cli/experiment.hpp"
#include "lps/data.hpp"
#include "lps/nets/checkpoint.hpp"
#include "lps/pdes.hpp"
#include "lps/symmetry.hpp"
#include "lps/training.hpp"

namespace lps::cli {

namespace fs = std::filesystem;

inline std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

// ---- generate -------------------------------------------------------------

inline std::string cmd_generate(const ExperimentConfig& c, std::ostream& log) {
  ensure_dir(c.output_dir);
  const auto d = data::build_dataset(c.dataset);
  const auto blob = data::to_blob(d);
  const std::string path = join(c.output_dir, "dataset.lps");
  io::save_blob(path, blob);
  write_text(join(c.output_dir, "dataset.manifest.json"), blob.meta.dump(2) + "\n");
  write_text(join(c.output_dir, "generate.config.json"), to_json(c).dump(2) + "\n");
  log << "wrote " << path << " (" << d.config.pde << ", N_f=" << d.train.size() << ", val=" << d.val.size()
      << ", test=" << d.test.size() << ", N_r=" << d.config.n_collocation << ", N_s=" << d.config.n_sensors
      << ", N_l=" << d.config.n_supervision << ", seed=" << d.config.seed << ")\n";
  return path;
}

// ---- train ----------------------------------------------------------------

/// Throws unless the dataset was generated with the same PDE, grid and point counts.
inline void check_dataset_matches(const data::DatasetConfig& want, const data::DatasetConfig& got) {
  const auto a = data::to_json(want), b = data::to_json(got);
  for (const char* key : {"pde", "nu", "grid", "N_s", "N_l"})
    if (a.at(key) != b.at(key))
      throw std::invalid_argument(std::string("dataset does not match the config: '") + key + "' is " +
                                  b.at(key).dump() + " in the dataset, " + a.at(key).dump() + " in the config");
}

struct TrainOutcome {
  train::TrainState state;
  std::string best_path;
  std::string history_path;
};

inline TrainOutcome cmd_train(ExperimentConfig c, const std::string& data_path, bool resume, std::ostream& log) {
  const auto d = data::load_dataset(data_path);
  check_dataset_matches(c.dataset, d.config);
  const std::uint64_t run_seed = c.seed;
  c.dataset = d.config;  // echo what was actually trained on
  ensure_dir(c.output_dir);
  const json resolved = to_json(c);
  write_text(join(c.output_dir, "train.config.json"), resolved.dump(2) + "\n");

  const auto pde = pdes::make_pde(d.config.pde, d.config.nu);
  auto oc = operator_config(c, d.sensor_x);
  oc.seed = run_seed;
  const nets::OperatorModel model(oc);
  train::Trainer trainer(model, d, pde, c.train);

  const std::string last = join(c.output_dir, "last.ckpt");
  train::TrainState s;
  if (resume && fs::exists(last)) {
    s = trainer.load_state(last);
    if (s.iter > c.train.max_iters) throw std::invalid_argument("state file is past max_iters");
    log << "resuming from iteration " << s.iter << "\n";
  } else {
    if (resume) log << "no state file at " << last << ", starting fresh\n";
    s = trainer.initial_state(model.initial_parameters());
  }

  train::RunOptions opt;
  opt.state_path = last;
  opt.meta = {{"experiment", resolved}, {"arm", c.arm}};
  trainer.run(s, opt);

  auto meta = [&](const char* which) {
    io::Blob extra;
    extra.meta = {{"experiment", resolved},   {"arm", c.arm},           {"which", which},
                  {"iteration", s.iter},       {"best_iteration", s.best_iter}, {"best_val_mse", s.best_val}};
    if (!std::isfinite(s.best_val)) extra.meta["best_val_mse"] = nullptr;
    return extra;
  };
  TrainOutcome out;
  out.best_path = join(c.output_dir, "best.ckpt");
  out.history_path = join(c.output_dir, "history.csv");
  nets::save_checkpoint(out.best_path, model, s.best_params, meta("best"));
  nets::save_checkpoint(join(c.output_dir, "final.ckpt"), model, s.params, meta("final"));
  trainer.save_state(last, s, opt.meta);
  write_text(out.history_path, train::history_csv(s.history));
  log << "arm " << c.arm << ": " << s.iter << " iterations" << (s.stopped ? " (early stop)" : "")
      << ", best validation MSE " << s.best_val << " at iteration " << s.best_iter << "\n";
  out.state = std::move(s);
  return out;
}

// ---- eval -----------------------------------------------------------------

inline void check_model_matches(const nets::OperatorModel& m, const data::Dataset& d) {
  if (m.config().sensors != d.sensor_x)
    throw std::invalid_argument("checkpoint sensors do not match the dataset's sensor locations");
}

inline json cmd_eval(const std::string& checkpoint, const std::string& data_path, const std::string& split,
                     const std::string& out_path, std::ostream& log) {
  const auto ck = nets::load_checkpoint(checkpoint);
  const auto d = data::load_dataset(data_path);
  check_model_matches(ck.model, d);
  d.split(split);
  const auto m = train::evaluate_mse(ck.model, ck.params, d, split);
  json j = {{"arm", ck.extra.meta.value("arm", "")},
            {"pde", d.config.pde},
            {"dataset_seed", d.config.seed},
            {"metrics", train::to_json(m)}};
  if (!out_path.empty()) {
    const auto parent = fs::path(out_path).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
    write_text(out_path, j.dump(2) + "\n");
  }
  log << split << " MSE " << m.mean << " +- " << m.std << " over " << m.per_ic.size() << " initial conditions\n";
  return j;
}

// ---- symcheck -------------------------------------------------------------

struct SymcheckRow {
  std::string name;
  sym::GeneratorClass kind = sym::GeneratorClass::useful;
  double ratio = 0.0;
  double max_abs_residual = 0.0;
  bool pass = false;
};

struct SymcheckReport {
  std::string pde;
  std::string source;
  double tol = 0.0;
  double max_abs_delta = 0.0;  // largest |Delta| on the jets used
  std::size_t jets = 0;
  std::vector<SymcheckRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const SymcheckRow& r) { return r.pass; });
  }
};

/// Jets of exact solutions: Fourier heat solutions, or viscous Burgers fronts
///   u = c - a tanh(a (x - c t) / (2 nu)).
inline std::vector<ad::Jet<double, 2>> analytic_jets(const std::string& pde, double nu, std::uint64_t seed,
                                                     std::size_t n_ic, std::size_t per_ic) {
  using T = ad::Taylor<double, 2>;
  std::vector<ad::Jet<double, 2>> jets;
  for (std::size_t i = 0; i < n_ic; ++i) {
    Rng rng = Rng::stream(seed, i);
    if (pde == "heat") {
      const data::Grid g;
      const auto ic = data::sample_initial_condition(rng, g.L, {});
      for (std::size_t p = 0; p < per_ic; ++p)
        jets.push_back(ad::jet_of<double, 2>(
            [&](const std::array<T, 2>& s) { return data::heat_exact(ic, nu, s[1], s[0]); },
            {rng.uniform(0, g.L), rng.uniform(0, g.T)}, 3));
    } else {
      const double c = rng.uniform(-1, 1), a = rng.uniform(0.1, 0.5);
      for (std::size_t p = 0; p < per_ic; ++p)
        jets.push_back(ad::jet_of<double, 2>(
            [&](const std::array<T, 2>& s) { return c - a * ad::tanh((s[0] - s[1] * c) * (a / (2 * nu))); },
            {rng.uniform(-3, 3), rng.uniform(0, 2.475)}, 3));
    }
  }
  return jets;
}

/// Jets of stored reference solutions at random interior grid nodes.
inline std::vector<ad::Jet<double, 2>> dataset_jets(const data::Dataset& d, std::uint64_t seed, std::size_t n_ic,
                                                    std::size_t per_ic) {
  std::vector<const data::IcRecord*> recs;
  for (const auto* split : {&d.train, &d.val, &d.test})
    for (const auto& r : *split) recs.push_back(&r);
  const auto& g = d.config.grid;
  std::vector<ad::Jet<double, 2>> jets;
  for (std::size_t i = 0; i < std::min(n_ic, recs.size()); ++i) {
    const data::GridJets gj(recs[i]->reference, g);
    Rng rng = Rng::stream(seed, recs[i]->id);
    for (std::size_t p = 0; p < per_ic; ++p)
      jets.push_back(gj.at(gj.first_time_index() + rng.index(gj.last_time_index() - gj.first_time_index() + 1),
                           rng.index(g.nx)));
  }
  return jets;
}

/// Classifies every generator off-shell and checks the criterion on solution jets.
/// Default tolerance: 1e-6 for analytic jets, 10x the largest |Delta| for dataset jets.
inline SymcheckReport symcheck(const pdes::PdeSystem<2>& pde, const std::string& source,
                               const std::vector<ad::Jet<double, 2>>& jets, std::optional<double> tol,
                               std::uint64_t seed) {
  SymcheckReport r;
  r.pde = pde.name();
  r.source = source;
  r.jets = jets.size();
  for (const auto& j : jets) r.max_abs_delta = std::max(r.max_abs_delta, std::abs(pde.residual(j)));
  r.tol = tol.value_or(source == "analytic" ? 1e-6 : 10.0 * r.max_abs_delta);
  for (const auto& v : pde.generators()) {
    const auto cls = sym::classify(pde, v, seed);
    const auto check = sym::criterion_check<2>(pde, v, jets, r.tol);
    r.rows.push_back({v.name(), cls.kind, cls.ratio, check.max_abs_residual, check.pass});
  }
  return r;
}

inline json to_json(const SymcheckReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e = {{"generator", row.name},
              {"class", sym::to_string(row.kind)},
              {"max_abs_residual", row.max_abs_residual},
              {"pass", row.pass}};
    if (row.kind == sym::GeneratorClass::delta_proportional) e["ratio"] = row.ratio;
    rows.push_back(e);
  }
  return {{"pde", r.pde},   {"source", r.source}, {"tol", r.tol}, {"max_abs_delta", r.max_abs_delta},
          {"jets", r.jets}, {"pass", r.all_pass()}, {"generators", rows}};
}

inline std::string format_table(const SymcheckReport& r) {
  std::ostringstream s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s symmetry check (%s jets: %zu, tol %.3g, max|Delta| %.3g)\n", r.pde.c_str(),
                r.source.c_str(), r.jets, r.tol, r.max_abs_delta);
  s << buf;
  std::snprintf(buf, sizeof buf, "%-10s %-20s %-10s %-14s %s\n", "generator", "class", "ratio", "max|residual|", "pass");
  s << buf;
  for (const auto& row : r.rows) {
    char ratio[32] = "-";
    if (row.kind == sym::GeneratorClass::delta_proportional) std::snprintf(ratio, sizeof ratio, "%.4g", row.ratio);
    std::snprintf(buf, sizeof buf, "%-10s %-20s %-10s %-14.3e %s\n", row.name.c_str(), sym::to_string(row.kind).c_str(),
                  ratio, row.max_abs_residual, row.pass ? "yes" : "NO");
    s << buf;
  }
  return s.str();
}

// ---- export-plots ---------------------------------------------------------

struct PlotInput {
  std::string label;
  std::string checkpoint;
};

inline std::string grid_csv(const data::Grid& g, const std::vector<double>& u) {
  std::string out = "t\\x";
  char buf[64];
  for (std::size_t j = 0; j < g.nx; ++j) {
    std::snprintf(buf, sizeof buf, ",%.17g", g.x(j));
    out += buf;
  }
  out += "\n";
  for (std::size_t k = 0; k < g.nt; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", g.t(k));
    out += buf;
    for (std::size_t j = 0; j < g.nx; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", u[k * g.nx + j]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

/// Grid row nearest to each requested time.
inline std::vector<std::size_t> time_rows(const data::Grid& g, const std::vector<double>& times) {
  std::vector<std::size_t> rows;
  for (double t : times) {
    if (!(t >= 0.0 && t <= g.T)) throw std::invalid_argument("time " + std::to_string(t) + " is outside [0, T]");
    rows.push_back(static_cast<std::size_t>(std::llround(t / g.dt())));
  }
  return rows;
}

inline json cmd_export_plots(const std::vector<PlotInput>& models, const std::string& data_path,
                             const std::string& split, std::size_t ic_index, const std::vector<double>& times,
                             const std::string& out_dir, std::ostream& log) {
  const auto d = data::load_dataset(data_path);
  const auto& recs = d.split(split);
  if (ic_index >= recs.size())
    throw std::invalid_argument("initial condition " + std::to_string(ic_index) + " is out of range for split '" +
                                split + "' (" + std::to_string(recs.size()) + " entries)");
  const auto& rec = recs[ic_index];
  const auto& g = d.config.grid;
  ensure_dir(out_dir);
  write_text(join(out_dir, "truth.csv"), grid_csv(g, rec.reference));

  std::vector<std::vector<double>> preds;
  json arms = json::array();
  for (const auto& m : models) {
    const auto ck = nets::load_checkpoint(m.checkpoint);
    check_model_matches(ck.model, d);
    const auto features = train::grid_features(ck.model, ck.params, g);
    preds.push_back(train::predict_grid(ck.model, ck.params, features, rec.sensors));
    double mse = 0.0;
    for (std::size_t i = 0; i < preds.back().size(); ++i)
      mse += (preds.back()[i] - rec.reference[i]) * (preds.back()[i] - rec.reference[i]);
    mse /= static_cast<double>(preds.back().size());
    const std::string file = "prediction_" + m.label + ".csv";
    write_text(join(out_dir, file), grid_csv(g, preds.back()));
    arms.push_back({{"label", m.label}, {"file", file}, {"mse", mse}});
  }

  const auto rows = time_rows(g, times);
  std::string slices = "t,x,truth";
  for (const auto& m : models) slices += "," + m.label;
  slices += "\n";
  char buf[96];
  for (std::size_t k : rows) {
    for (std::size_t j = 0; j < g.nx; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", g.t(k), g.x(j), rec.reference[k * g.nx + j]);
      slices += buf;
      for (const auto& p : preds) {
        std::snprintf(buf, sizeof buf, ",%.17g", p[k * g.nx + j]);
        slices += buf;
      }
      slices += "\n";
    }
  }
  write_text(join(out_dir, "slices.csv"), slices);

  std::vector<double> snapped;
  for (std::size_t k : rows) snapped.push_back(g.t(k));
  json manifest = {{"pde", d.config.pde},
                   {"split", split},
                   {"ic_index", ic_index},
                   {"ic_id", rec.id},
                   {"shape", {g.nt, g.nx}},
                   {"truth", "truth.csv"},
                   {"slices", "slices.csv"},
                   {"times_requested", times},
                   {"times", snapped},
                   {"arms", arms}};
  write_text(join(out_dir, "plots.json"), manifest.dump(2) + "\n");
  log << "wrote plot data for " << split << "[" << ic_index << "] to " << out_dir << "\n";
  return manifest;
}

}  // namespace lps::cli
