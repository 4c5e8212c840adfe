#pragma once

// Loss terms on jets and predictions. Everything is templated on the scalar
// so one code path serves plain evaluation (double) and training (Var).
//
//   L_PDE  = mean over points of Delta^2
//   L_data = mean over initial points + mean over boundary points
//   L_sym  = mean over points of sum_k r_k^2        (dot_squared)
//          = mean over points of sum_k |cos_k|      (abs_cosine)

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/data/dataset.hpp"
#include "lps/nets/operator_model.hpp"
#include "lps/pdes/pde_system.hpp"
#include "lps/symmetry/criterion.hpp"

namespace lps::train {

enum class SymForm { dot_squared, abs_cosine };

inline SymForm parse_sym_form(const std::string& s) {
  if (s == "dot_squared") return SymForm::dot_squared;
  if (s == "abs_cosine") return SymForm::abs_cosine;
  throw std::invalid_argument("unknown symmetry loss form '" + s + "' (expected dot_squared or abs_cosine)");
}

inline std::string to_string(SymForm f) { return f == SymForm::dot_squared ? "dot_squared" : "abs_cosine"; }

inline SymForm default_sym_form(const std::string& pde) {
  return pde == "burgers" ? SymForm::abs_cosine : SymForm::dot_squared;
}

struct LossWeights {
  double alpha = 0.0;  // L_PDE
  double beta = 20.0;  // L_data
  double gamma = 100.0;  // L_sym

  void validate(bool has_collocation) const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0))
      throw std::invalid_argument("loss weights must be non-negative");
    if (has_collocation && alpha == 0.0 && gamma == 0.0)
      throw std::invalid_argument("alpha or gamma must be positive when collocation points are present");
  }
};

template <class N>
struct LossTerms {
  N pde{0.0};
  N data{0.0};
  N sym{0.0};
  N total{0.0};
};

namespace detail {
inline double abs_of(double v) { return std::abs(v); }
inline ad::Var abs_of(const ad::Var& v) { return ad::abs(v); }
}  // namespace detail

/// Mean squared residual over the jets; zero for an empty batch.
template <class N>
N pde_loss(const pdes::PdeSystem<2>& pde, std::span<const ad::Jet<N, 2>> jets) {
  N s(0.0);
  if (jets.empty()) return s;
  for (const auto& j : jets) {
    const N r = pde.residual(j);
    s = s + r * r;
  }
  return s / static_cast<double>(jets.size());
}

/// Initial and boundary mean squared errors, each averaged over its own count.
template <class N>
N data_fit_loss(std::span<const N> pred_initial, std::span<const double> target_initial,
                std::span<const N> pred_boundary, std::span<const double> target_boundary) {
  if (pred_initial.size() != target_initial.size() || pred_boundary.size() != target_boundary.size())
    throw std::invalid_argument("data_fit_loss: predictions and targets differ in length");
  if (pred_initial.empty() && pred_boundary.empty()) throw std::invalid_argument("data_fit_loss: empty batch");
  auto mse = [](std::span<const N> p, std::span<const double> y) {
    N s(0.0);
    if (p.empty()) return s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const N d = p[i] - y[i];
      s = s + d * d;
    }
    return s / static_cast<double>(p.size());
  };
  return mse(pred_initial, target_initial) + mse(pred_boundary, target_boundary);
}

template <class N>
N sym_loss(const pdes::PdeSystem<2>& pde, std::span<const sym::VectorField<2>> generators, SymForm form,
           std::span<const ad::Jet<N, 2>> jets) {
  if (generators.empty()) throw std::invalid_argument("sym_loss: no generators selected");
  N s(0.0);
  if (jets.empty()) return s;
  for (const auto& j : jets) {
    // one prolongation per generator, the PDE gradient is shared
    const auto grad = pde.gradient(j);
    for (const auto& v : generators) {
      const auto coef = sym::prolong(v, j, pde.order());
      if (form == SymForm::dot_squared) {
        const N r = sym::contract<N>(grad, coef.entries);
        s = s + r * r;
      } else {
        s = s + detail::abs_of(sym::cosine<N>(grad, coef.entries));
      }
    }
  }
  return s / static_cast<double>(jets.size());
}

/// Collocation points of one minibatch, grouped by training initial condition.
struct CollocationBatch {
  struct Group {
    std::size_t ic = 0;  // index into the training split
    std::vector<std::size_t> points;
  };
  std::vector<Group> groups;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.points.size();
    return n;
  }
};

/// Every collocation point of every training initial condition.
inline CollocationBatch full_batch(const data::Dataset& d) {
  CollocationBatch b;
  for (std::size_t i = 0; i < d.train.size(); ++i) {
    CollocationBatch::Group g{i, {}};
    for (std::size_t p = 0; p < d.train[i].col_x.size(); ++p) g.points.push_back(p);
    if (!g.points.empty()) b.groups.push_back(std::move(g));
  }
  return b;
}

// Predictor interface used by assemble_losses:
//   std::vector<N> supervision(ic)             predictions at the shared supervision points
//   ad::Jet<N, 2> jet(ic, t, x, order)         jet of the prediction
template <class N>
class ModelPredictor {
 public:
  ModelPredictor(const nets::OperatorModel& model, std::span<const N> params, const data::Dataset& d)
      : model_(model), params_(params), d_(d), embeddings_(d.train.size()) {}

  const std::vector<N>& embedding(std::size_t ic) {
    auto& e = embeddings_.at(ic);
    if (!e) e = model_.embed<N>(params_, d_.train[ic].sensors);
    return *e;
  }

  std::vector<N> supervision(std::size_t ic) {
    if (sup_features_.empty()) {
      for (std::size_t p = 0; p < d_.sup_x.size(); ++p)
        sup_features_.push_back(model_.features<N, N>(params_, std::array<N, 2>{N(d_.sup_x[p]), N(d_.sup_t[p])}));
    }
    const auto& e = embedding(ic);
    std::vector<N> out;
    out.reserve(sup_features_.size());
    for (const auto& g : sup_features_) out.push_back(nets::OperatorModel::combine<N, N>(e, g));
    return out;
  }

  ad::Jet<N, 2> jet(std::size_t ic, double t, double x, int order) {
    return model_.jet<N>(params_, embedding(ic), t, x, order);
  }

 private:
  const nets::OperatorModel& model_;
  std::span<const N> params_;
  const data::Dataset& d_;
  std::vector<std::optional<std::vector<N>>> embeddings_;
  std::vector<std::vector<N>> sup_features_;
};

struct LossRequest {
  bool pde = true;
  bool data = true;
  bool sym = true;
};

/// Loss components for one batch: data fit over all training initial
/// conditions, PDE and symmetry terms on the collocation batch.
template <class N, class Predictor>
LossTerms<N> assemble_losses(Predictor& predictor, const data::Dataset& d, const CollocationBatch& batch,
                             const pdes::PdeSystem<2>& pde, std::span<const sym::VectorField<2>> generators,
                             SymForm form, const LossWeights& w, LossRequest need = {}) {
  LossTerms<N> out;
  if (need.data) {
    const std::size_t ns = d.n_initial();
    std::vector<N> pi, pb;
    std::vector<double> yi, yb;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
      const auto pred = predictor.supervision(i);
      const auto& y = d.train[i].sup_u;
      for (std::size_t p = 0; p < pred.size(); ++p) {
        (p < ns ? pi : pb).push_back(pred[p]);
        (p < ns ? yi : yb).push_back(y[p]);
      }
    }
    out.data = data_fit_loss<N>(pi, yi, pb, yb);
  }
  if ((need.pde || (need.sym && !generators.empty())) && batch.size() > 0) {
    std::vector<ad::Jet<N, 2>> jets;
    jets.reserve(batch.size());
    for (const auto& g : batch.groups) {
      const auto& r = d.train.at(g.ic);
      for (std::size_t p : g.points) jets.push_back(predictor.jet(g.ic, r.col_t.at(p), r.col_x.at(p), pde.order() + 1));
    }
    if (need.pde) out.pde = pde_loss<N>(pde, jets);
    if (need.sym && !generators.empty()) out.sym = sym_loss<N>(pde, generators, form, jets);
  }
  out.total = w.alpha * out.pde + w.beta * out.data + w.gamma * out.sym;
  return out;
}

}  // namespace lps::train
