#pragma once

// Training loop: sample a collocation batch, build jets of the prediction,
// assemble alpha L_PDE + beta L_data + gamma L_sym, take an ADAM step, and
// every check interval record the loss components and validation MSE. The
// returned best parameters are the argmin of validation MSE over checks
// (earliest on ties); training stops after `patience` checks without a new
// best.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lps/autodiff/tape.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/nets/checkpoint.hpp"
#include "lps/pdes/pde_system.hpp"
#include "lps/training/adam.hpp"
#include "lps/training/evaluate.hpp"
#include "lps/training/losses.hpp"
#include "lps/util/random.hpp"

namespace lps::train {

struct TrainConfig {
  LossWeights weights;
  SymForm sym_form = SymForm::dot_squared;
  std::vector<std::string> generators;  // names, empty when gamma == 0
  AdamConfig adam;
  std::size_t full_batch_limit = 4096;
  std::size_t minibatch = 1024;
  std::size_t max_iters = 5000;
  std::size_t check_every = 100;
  std::size_t patience = 50;
  std::uint64_t seed = 0;

  void validate(const pdes::PdeSystem<2>& pde, bool has_collocation) const {
    weights.validate(has_collocation);
    adam.validate();
    if (weights.gamma > 0.0 && generators.empty())
      throw std::invalid_argument("gamma > 0 needs at least one generator");
    for (const auto& g : generators) pde.generator_index(g);
    if (check_every == 0 || minibatch == 0) throw std::invalid_argument("check_every and minibatch must be positive");
  }
};

/// Default loss weights, indexed by N_r in {<= 500, <= 2000, larger}.
///   sym arm:      L_sym 100 / 80 / 40, data 20
///   baseline arm: L_PDE 150 / 150 / 130, data 20
/// The heat sym arm drops L_PDE; Burgers keeps it alongside L_sym.
inline TrainConfig default_train_config(const pdes::PdeSystem<2>& pde, const std::string& arm,
                                        std::size_t n_collocation) {
  const int tier = n_collocation <= 500 ? 0 : n_collocation <= 2000 ? 1 : 2;
  const double sym_w[] = {100.0, 80.0, 40.0};
  const double pde_w[] = {150.0, 150.0, 130.0};
  TrainConfig c;
  c.sym_form = default_sym_form(pde.name());
  c.weights.beta = 20.0;
  if (arm == "sym") {
    c.weights.gamma = sym_w[tier];
    c.weights.alpha = pde.name() == "heat" ? 0.0 : pde_w[tier];
    for (std::size_t k = 0; k < pde.generators().size(); ++k)
      if (pde.useful_mask()[k]) c.generators.push_back(pde.generators()[k].name());
  } else if (arm == "baseline") {
    c.weights.alpha = pde_w[tier];
    c.weights.gamma = 0.0;
  } else {
    throw std::invalid_argument("unknown arm '" + arm + "' (expected sym or baseline)");
  }
  return c;
}

inline std::vector<sym::VectorField<2>> select_generators(const pdes::PdeSystem<2>& pde,
                                                          const std::vector<std::string>& names) {
  std::vector<sym::VectorField<2>> out;
  for (const auto& n : names) out.push_back(pde.generators()[pde.generator_index(n)]);
  return out;
}

struct HistoryRow {
  std::size_t iter = 0;
  double total = 0, pde = 0, data = 0, sym = 0, val_mse = 0;
};

inline std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::string out = "iteration,total,pde,data,sym,val_mse\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.total, r.pde, r.data, r.sym,
                  r.val_mse);
    out += buf;
  }
  return out;
}

struct TrainState {
  std::vector<double> params;
  AdamState adam;
  std::size_t iter = 0;
  std::vector<double> best_params;
  std::size_t best_iter = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t bad_checks = 0;
  bool stopped = false;
  std::vector<HistoryRow> history;
};

struct RunOptions {
  std::string state_path;  // written at every check when non-empty
  std::size_t stop_after = std::numeric_limits<std::size_t>::max();  // iteration cap for this call
  io::json meta = io::json::object();  // extra manifest entries for the state file
};

class Trainer {
 public:
  Trainer(const nets::OperatorModel& model, const data::Dataset& d, const pdes::PdeSystem<2>& pde, TrainConfig c)
      : model_(model), d_(d), pde_(pde), c_(std::move(c)) {
    if (d_.train.empty()) throw std::invalid_argument("training split is empty");
    if (model_.sensor_count() != d_.n_initial())
      throw std::invalid_argument("model sensor count does not match the dataset");
    for (std::size_t i = 0; i < d_.train.size(); ++i) {
      offsets_.push_back(total_points_);
      total_points_ += d_.train[i].col_x.size();
    }
    c_.validate(pde_, total_points_ > 0);
    generators_ = select_generators(pde_, c_.generators);
  }

  const TrainConfig& config() const noexcept { return c_; }
  std::size_t collocation_count() const noexcept { return total_points_; }

  TrainState initial_state(std::vector<double> params) const {
    if (params.size() != model_.parameter_count()) throw std::invalid_argument("initial parameter count mismatch");
    TrainState s;
    s.adam = AdamState(params.size());
    s.best_params = params;
    s.params = std::move(params);
    return s;
  }

  /// Full collocation set when small, else a uniform minibatch drawn from the iteration's own stream.
  CollocationBatch batch_for(std::size_t iter) const {
    if (total_points_ <= c_.full_batch_limit) return full_batch(d_);
    Rng rng = Rng::stream(c_.seed, iter);
    auto flat = data::detail::sample_without_replacement(rng, total_points_, std::min(c_.minibatch, total_points_));
    std::sort(flat.begin(), flat.end());
    CollocationBatch b;
    for (std::size_t f : flat) {
      const auto ic = static_cast<std::size_t>(std::upper_bound(offsets_.begin(), offsets_.end(), f) - offsets_.begin()) - 1;
      if (b.groups.empty() || b.groups.back().ic != ic) b.groups.push_back({ic, {}});
      b.groups.back().points.push_back(f - offsets_[ic]);
    }
    return b;
  }

  LossRequest objective_terms() const {
    return {c_.weights.alpha > 0.0, c_.weights.beta > 0.0, c_.weights.gamma > 0.0};
  }

  LossTerms<double> losses(std::span<const double> params, const CollocationBatch& b, LossRequest need) const {
    ModelPredictor<double> p(model_, params, d_);
    return assemble_losses<double>(p, d_, b, pde_, generators_, c_.sym_form, c_.weights, need);
  }

  /// Loss components (values) and the gradient of the weighted total.
  std::pair<LossTerms<double>, std::vector<double>> loss_and_gradient(std::span<const double> params,
                                                                      const CollocationBatch& b, LossRequest need) {
    ad::Record rec(tape_);
    const auto pv = ad::record_scalars(params);
    ModelPredictor<ad::Var> p(model_, pv, d_);
    const auto t = assemble_losses<ad::Var>(p, d_, b, pde_, generators_, c_.sym_form, c_.weights, need);
    LossTerms<double> v{t.pde.v, t.data.v, t.sym.v, t.total.v};
    for (auto [name, x] : {std::pair{"L_PDE", v.pde}, {"L_data", v.data}, {"L_sym", v.sym}, {"total", v.total}})
      if (!std::isfinite(x)) throw NonFiniteError(std::string("non-finite ") + name + " loss");
    return {v, ad::gradient(t.total, pv)};
  }

  double validation_mse(std::span<const double> params) const {
    if (d_.val.empty()) return std::numeric_limits<double>::quiet_NaN();
    return evaluate_mse(model_, params, d_, "val").mean;
  }

  void run(TrainState& s, const RunOptions& opt = {}) {
    std::size_t done_here = 0;
    while (!s.stopped && s.iter < c_.max_iters && done_here < opt.stop_after) {
      const std::size_t iter = s.iter + 1;
      const bool check = iter % c_.check_every == 0 || iter == c_.max_iters;
      const LossRequest need = check ? LossRequest{true, true, !generators_.empty()} : objective_terms();
      const auto batch = batch_for(iter);
      auto [terms, grad] = loss_and_gradient(s.params, batch, need);
      adam_step(s.params, grad, s.adam, c_.adam);
      s.iter = iter;
      ++done_here;
      if (check) {
        const double val = validation_mse(s.params);
        s.history.push_back({iter, terms.total, terms.pde, terms.data, terms.sym, val});
        if (d_.val.empty() || val < s.best_val) {
          s.best_val = d_.val.empty() ? s.best_val : val;
          s.best_iter = iter;
          s.best_params = s.params;
          s.bad_checks = 0;
        } else if (++s.bad_checks >= c_.patience) {
          s.stopped = true;
        }
        if (!opt.state_path.empty()) save_state(opt.state_path, s, opt.meta);
      }
    }
  }

  void save_state(const std::string& path, const TrainState& s, const io::json& meta = io::json::object()) const {
    io::Blob extra;
    extra.meta = meta;
    extra.meta["train_state"] = {{"iteration", s.iter},
                                 {"best_iteration", s.best_iter},
                                 {"bad_checks", s.bad_checks},
                                 {"stopped", s.stopped},
                                 {"adam_step", s.adam.step},
                                 {"history_columns", "iteration,total,pde,data,sym,val_mse"}};
    extra.blocks["adam_m"] = s.adam.m;
    extra.blocks["adam_v"] = s.adam.v;
    extra.blocks["best_params"] = s.best_params;
    extra.blocks["best_val"] = {s.best_val};
    std::vector<double> h;
    for (const auto& r : s.history)
      h.insert(h.end(), {static_cast<double>(r.iter), r.total, r.pde, r.data, r.sym, r.val_mse});
    extra.blocks["history"] = h;
    nets::save_checkpoint(path, model_, s.params, std::move(extra));
  }

  TrainState load_state(const std::string& path) const {
    const auto ck = nets::load_checkpoint(path);
    if (nets::to_json(ck.model.config()) != nets::to_json(model_.config()))
      throw std::invalid_argument("state file '" + path + "' was written for a different model");
    const auto& m = ck.extra.meta.at("train_state");
    TrainState s;
    s.params = ck.params;
    s.iter = m.at("iteration");
    s.best_iter = m.at("best_iteration");
    s.bad_checks = m.at("bad_checks");
    s.stopped = m.at("stopped");
    s.adam.step = m.at("adam_step");
    s.adam.m = ck.extra.block("adam_m");
    s.adam.v = ck.extra.block("adam_v");
    s.best_params = ck.extra.block("best_params");
    s.best_val = ck.extra.block("best_val").at(0);
    const auto& h = ck.extra.block("history");
    if (h.size() % 6 != 0 || s.adam.m.size() != s.params.size() || s.adam.v.size() != s.params.size() ||
        s.best_params.size() != s.params.size())
      throw io::FormatError("state file '" + path + "' has inconsistent optimizer blocks");
    for (std::size_t i = 0; i < h.size(); i += 6)
      s.history.push_back({static_cast<std::size_t>(h[i]), h[i + 1], h[i + 2], h[i + 3], h[i + 4], h[i + 5]});
    return s;
  }

 private:
  const nets::OperatorModel& model_;
  const data::Dataset& d_;
  const pdes::PdeSystem<2>& pde_;
  TrainConfig c_;
  std::vector<sym::VectorField<2>> generators_;
  std::vector<std::size_t> offsets_;
  std::size_t total_points_ = 0;
  ad::Tape tape_;
};

}  // namespace lps::train
