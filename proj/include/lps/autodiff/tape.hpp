#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lps::ad {

/// Node handle used by values that were never recorded (plain constants).
inline constexpr std::uint32_t kConstantId = std::numeric_limits<std::uint32_t>::max();

// Tape: a Wengert list of scalar nodes. Each node stores its value and the
// local partials towards its parents. A reverse sweep accumulates adjoints.
//
// Besides plain scalar nodes the tape supports one fused external node kind,
// the affine map `out[i][c] = sum_j W[i][j] * in[j][c] + b[i] * (c == 0)`,
// where `c` runs over Taylor coefficients. Its outputs are ordinary nodes
// without edges; the reverse sweep calls the fused adjoint once every
// consumer of the outputs has been processed.
class Tape {
 public:
  Tape() { node_end_.reserve(1024); }

  std::size_t size() const noexcept { return values_.size(); }
  double value(std::uint32_t id) const { return values_[id]; }

  void clear() noexcept {
    values_.clear();
    node_end_.clear();
    edge_parent_.clear();
    edge_partial_.clear();
    affine_ops_.clear();
    affine_ids_.clear();
    affine_vals_.clear();
  }

  std::uint32_t leaf(double v) { return push(v); }

  std::uint32_t unary(double v, std::uint32_t p, double dp) {
    edge_parent_.push_back(p);
    edge_partial_.push_back(dp);
    return push(v);
  }

  std::uint32_t binary(double v, std::uint32_t p0, double d0, std::uint32_t p1, double d1) {
    edge_parent_.push_back(p0);
    edge_partial_.push_back(d0);
    edge_parent_.push_back(p1);
    edge_partial_.push_back(d1);
    return push(v);
  }

  // Incremental node construction: add_edge() any number of times, then
  // finish_node(). Returns kConstantId when no edge was added.
  void add_edge(std::uint32_t parent, double partial) {
    edge_parent_.push_back(parent);
    edge_partial_.push_back(partial);
  }
  std::size_t pending_edges() const noexcept {
    return edge_parent_.size() - (node_end_.empty() ? 0 : node_end_.back());
  }
  std::uint32_t finish_node(double v) {
    if (pending_edges() == 0) return kConstantId;
    return push(v);
  }

  /// Records the fused affine map. `w_base` and `b_base` are the ids of the
  /// first weight/bias leaf; weights must be contiguous leaves in row-major
  /// (out x in) order, biases contiguous (or kConstantId for no bias).
  /// `in_ids`/`in_vals` hold n_in * ncoef entries, input-major. Returns the id
  /// of the first of n_out * ncoef consecutive output nodes (output-major).
  std::uint32_t affine(std::uint32_t w_base, std::uint32_t b_base, std::span<const std::uint32_t> in_ids,
                       std::span<const double> in_vals, std::uint32_t n_in, std::uint32_t n_out,
                       std::uint32_t ncoef) {
    AffineOp op;
    op.out_begin = static_cast<std::uint32_t>(values_.size());
    op.w_base = w_base;
    op.b_base = b_base;
    op.n_in = n_in;
    op.n_out = n_out;
    op.ncoef = ncoef;
    op.data = affine_ids_.size();
    affine_ids_.insert(affine_ids_.end(), in_ids.begin(), in_ids.end());
    affine_vals_.insert(affine_vals_.end(), in_vals.begin(), in_vals.end());

    const std::size_t out_n = static_cast<std::size_t>(n_out) * ncoef;
    const std::size_t first = values_.size();
    values_.resize(first + out_n, 0.0);
    const std::size_t edges = edge_parent_.size();
    node_end_.resize(first + out_n, static_cast<std::uint32_t>(edges));
    double* out = values_.data() + first;
    const double* w = values_.data() + w_base;
    for (std::uint32_t i = 0; i < n_out; ++i) {
      double* o = out + static_cast<std::size_t>(i) * ncoef;
      const double* wi = w + static_cast<std::size_t>(i) * n_in;
      for (std::uint32_t j = 0; j < n_in; ++j) {
        const double wij = wi[j];
        const double* x = in_vals.data() + static_cast<std::size_t>(j) * ncoef;
        for (std::uint32_t c = 0; c < ncoef; ++c) o[c] += wij * x[c];
      }
      if (b_base != kConstantId) o[0] += values_[b_base + i];
    }
    affine_ops_.push_back(op);
    return op.out_begin;
  }

  /// Full adjoint vector for d(root)/d(node).
  std::vector<double> adjoints(std::uint32_t root) const {
    std::vector<double> adj(values_.size(), 0.0);
    if (root == kConstantId) return adj;
    if (root >= values_.size()) throw std::out_of_range("adjoints: root not on this tape");
    adj[root] = 1.0;
    std::size_t next_op = affine_ops_.size();
    while (next_op > 0 && affine_ops_[next_op - 1].out_begin > root) --next_op;
    for (std::size_t i = root + 1; i-- > 0;) {
      const double g = adj[i];
      if (g != 0.0) {
        const std::uint32_t begin = i == 0 ? 0 : node_end_[i - 1];
        const std::uint32_t end = node_end_[i];
        for (std::uint32_t e = begin; e < end; ++e) adj[edge_parent_[e]] += edge_partial_[e] * g;
      }
      if (next_op > 0 && affine_ops_[next_op - 1].out_begin == i) {
        affine_adjoint(affine_ops_[next_op - 1], adj);
        --next_op;
      }
    }
    return adj;
  }

 private:
  struct AffineOp {
    std::uint32_t out_begin;
    std::uint32_t w_base;
    std::uint32_t b_base;
    std::uint32_t n_in;
    std::uint32_t n_out;
    std::uint32_t ncoef;
    std::size_t data;
  };

  std::uint32_t push(double v) {
    if (values_.size() >= kConstantId) throw std::length_error("tape: node count exceeds 32-bit handle range");
    values_.push_back(v);
    node_end_.push_back(static_cast<std::uint32_t>(edge_parent_.size()));
    return static_cast<std::uint32_t>(values_.size() - 1);
  }

  void affine_adjoint(const AffineOp& op, std::vector<double>& adj) const {
    const std::uint32_t* ids = affine_ids_.data() + op.data;
    const double* xs = affine_vals_.data() + op.data;
    const double* w = values_.data() + op.w_base;
    double* gw = adj.data() + op.w_base;
    const double* gout = adj.data() + op.out_begin;
    for (std::uint32_t i = 0; i < op.n_out; ++i) {
      const double* go = gout + static_cast<std::size_t>(i) * op.ncoef;
      const double* wi = w + static_cast<std::size_t>(i) * op.n_in;
      double* gwi = gw + static_cast<std::size_t>(i) * op.n_in;
      if (op.b_base != kConstantId) adj[op.b_base + i] += go[0];
      for (std::uint32_t j = 0; j < op.n_in; ++j) {
        const double* x = xs + static_cast<std::size_t>(j) * op.ncoef;
        const std::uint32_t* id = ids + static_cast<std::size_t>(j) * op.ncoef;
        double acc = 0.0;
        for (std::uint32_t c = 0; c < op.ncoef; ++c) {
          acc += go[c] * x[c];
          if (id[c] != kConstantId) adj[id[c]] += wi[j] * go[c];
        }
        gwi[j] += acc;
      }
    }
  }

  std::vector<double> values_;
  std::vector<std::uint32_t> node_end_;
  std::vector<std::uint32_t> edge_parent_;
  std::vector<double> edge_partial_;
  std::vector<AffineOp> affine_ops_;
  std::vector<std::uint32_t> affine_ids_;
  std::vector<double> affine_vals_;
};

namespace detail {
inline thread_local Tape* g_active_tape = nullptr;
}  // namespace detail

/// The computation record active on this thread.
inline Tape& active_tape() {
  if (detail::g_active_tape == nullptr) throw std::logic_error("no active computation record on this thread");
  return *detail::g_active_tape;
}

inline bool has_active_tape() noexcept { return detail::g_active_tape != nullptr; }

// Record: RAII activation of a tape on the current thread. Either owns a
// fresh tape or borrows (and clears) one whose buffers are reused across
// training steps.
class Record {
 public:
  Record() : tape_(&owned_), previous_(detail::g_active_tape) { detail::g_active_tape = tape_; }
  explicit Record(Tape& reuse) : tape_(&reuse), previous_(detail::g_active_tape) {
    tape_->clear();
    detail::g_active_tape = tape_;
  }
  ~Record() { detail::g_active_tape = previous_; }
  Record(const Record&) = delete;
  Record& operator=(const Record&) = delete;

  Tape& tape() noexcept { return *tape_; }

 private:
  Tape owned_;
  Tape* tape_;
  Tape* previous_;
};

}  // namespace lps::ad
