#pragma once

// Affine maps out = W in + b over every number type the networks evaluate
// with. W is row-major (out x in); an empty bias span means no bias. For Var
// weights that are contiguous leaves the map is recorded as one fused tape
// node covering every Taylor coefficient; otherwise it falls back to one
// scalar node per output coefficient.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lps/autodiff/tape.hpp"
#include "lps/autodiff/taylor.hpp"
#include "lps/autodiff/var.hpp"

namespace lps::ad {

namespace detail {

inline void check_affine_shape(std::size_t w, std::size_t b, std::size_t in, std::size_t out) {
  if (w != in * out || (b != 0 && b != out)) throw std::invalid_argument("affine: dimension mismatch");
}

inline bool contiguous_leaves(std::span<const Var> v) {
  if (v.empty() || v[0].is_constant()) return false;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k].id != v[0].id + k) return false;
  return true;
}

template <class In>
double coef_value(const In& x, std::size_t c) {
  if constexpr (is_taylor_v<In>) {
    return to_double(x[c]);
  } else {
    return to_double(x);
  }
}

template <class In>
std::uint32_t coef_id(const In& x, std::size_t c) {
  if constexpr (is_taylor_v<In>) {
    return x[c].id;
  } else {
    return x.id;
  }
}

// Shared Var implementation; In is Var or Taylor<Var, P>, ncoef its length.
template <class In>
void affine_var(std::span<const Var> w, std::span<const Var> b, std::span<const In> in, std::span<In> out,
                std::size_t ncoef, auto&& assign) {
  const std::size_t n_in = in.size();
  const std::size_t n_out = out.size();
  Tape& tape = active_tape();
  if (contiguous_leaves(w) && (b.empty() || contiguous_leaves(b))) {
    std::vector<std::uint32_t> ids(n_in * ncoef);
    std::vector<double> vals(n_in * ncoef);
    for (std::size_t j = 0; j < n_in; ++j) {
      for (std::size_t c = 0; c < ncoef; ++c) {
        ids[j * ncoef + c] = coef_id(in[j], c);
        vals[j * ncoef + c] = coef_value(in[j], c);
      }
    }
    const std::uint32_t first =
        tape.affine(w[0].id, b.empty() ? kConstantId : b[0].id, ids, vals, static_cast<std::uint32_t>(n_in),
                    static_cast<std::uint32_t>(n_out), static_cast<std::uint32_t>(ncoef));
    for (std::size_t i = 0; i < n_out; ++i) {
      for (std::size_t c = 0; c < ncoef; ++c) {
        const std::uint32_t id = first + static_cast<std::uint32_t>(i * ncoef + c);
        assign(out[i], c, Var(tape.value(id), id));
      }
    }
    return;
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    for (std::size_t c = 0; c < ncoef; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_in; ++j) {
        const Var& wij = w[i * n_in + j];
        const std::uint32_t xid = coef_id(in[j], c);
        const double xv = coef_value(in[j], c);
        s += wij.v * xv;
        if (!wij.is_constant() && xv != 0.0) tape.add_edge(wij.id, xv);
        if (xid != kConstantId && wij.v != 0.0) tape.add_edge(xid, wij.v);
      }
      if (c == 0 && !b.empty()) {
        s += b[i].v;
        if (!b[i].is_constant()) tape.add_edge(b[i].id, 1.0);
      }
      assign(out[i], c, Var(s, tape.finish_node(s)));
    }
  }
}

}  // namespace detail

inline void affine(std::span<const double> w, std::span<const double> b, std::span<const double> in,
                   std::span<double> out) {
  detail::check_affine_shape(w.size(), b.size(), in.size(), out.size());
  const std::size_t n_in = in.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = b.empty() ? 0.0 : b[i];
    const double* wi = w.data() + i * n_in;
    for (std::size_t j = 0; j < n_in; ++j) s += wi[j] * in[j];
    out[i] = s;
  }
}

template <std::size_t P>
void affine(std::span<const double> w, std::span<const double> b, std::span<const Taylor<double, P>> in,
            std::span<Taylor<double, P>> out) {
  detail::check_affine_shape(w.size(), b.size(), in.size(), out.size());
  if (in.empty()) throw std::invalid_argument("affine: empty input");
  const int order = in[0].order();
  const std::size_t n_in = in.size();
  const std::size_t nc = in[0].size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    Taylor<double, P> s(order);
    const double* wi = w.data() + i * n_in;
    for (std::size_t j = 0; j < n_in; ++j)
      for (std::size_t c = 0; c < nc; ++c) s[c] += wi[j] * in[j][c];
    if (!b.empty()) s[0] += b[i];
    out[i] = s;
  }
}

inline void affine(std::span<const Var> w, std::span<const Var> b, std::span<const Var> in, std::span<Var> out) {
  detail::check_affine_shape(w.size(), b.size(), in.size(), out.size());
  detail::affine_var<Var>(w, b, in, out, 1, [](Var& o, std::size_t, const Var& v) { o = v; });
}

template <std::size_t P>
void affine(std::span<const Var> w, std::span<const Var> b, std::span<const Taylor<Var, P>> in,
            std::span<Taylor<Var, P>> out) {
  detail::check_affine_shape(w.size(), b.size(), in.size(), out.size());
  if (in.empty()) throw std::invalid_argument("affine: empty input");
  const int order = in[0].order();
  for (auto& o : out) o = Taylor<Var, P>(order);
  detail::affine_var<Taylor<Var, P>>(w, b, in, out, in[0].size(),
                                     [](Taylor<Var, P>& o, std::size_t c, const Var& v) { o[c] = v; });
}

}  // namespace lps::ad
