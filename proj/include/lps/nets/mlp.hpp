#pragma once

// Fully connected networks evaluated over any number type the autodiff layer
// provides: double, Var, Taylor<double, P> and Taylor<Var, P>.
//
// Parameter layout (flat, float64): layer-major, each layer its weights in
// row-major (out x in) order followed by its biases. The modified variant
// stores the two encoders U and V first, then the layers.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lps/autodiff/affine.hpp"
#include "lps/autodiff/taylor.hpp"
#include "lps/autodiff/var.hpp"
#include "lps/util/random.hpp"

namespace lps::nets {

enum class Activation { elu, tanh };
enum class Variant { plain, modified };

inline std::string to_string(Activation a) { return a == Activation::elu ? "elu" : "tanh"; }
inline std::string to_string(Variant v) { return v == Variant::plain ? "plain" : "modified"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "elu") return Activation::elu;
  if (s == "tanh") return Activation::tanh;
  throw std::invalid_argument("activation '" + s + "' is not smooth or not supported (use elu or tanh)");
}

inline Variant parse_variant(const std::string& s) {
  if (s == "plain") return Variant::plain;
  if (s == "modified") return Variant::modified;
  throw std::invalid_argument("unknown MLP variant '" + s + "'");
}

// widths = {input, hidden..., output}.
struct MlpConfig {
  std::vector<std::size_t> widths;
  Activation activation = Activation::elu;
  Variant variant = Variant::plain;
};

template <class X>
X activate(Activation a, const X& z) {
  return a == Activation::elu ? ad::elu(z) : ad::tanh(z);
}

class Mlp {
 public:
  struct Layer {
    std::size_t w;  // offset of the weights
    std::size_t b;  // offset of the biases
    std::size_t in;
    std::size_t out;
  };

  Mlp() = default;

  explicit Mlp(MlpConfig config) : config_(std::move(config)) {
    const auto& w = config_.widths;
    if (w.size() < 3) throw std::invalid_argument("MLP needs an input, at least one hidden layer and an output");
    for (std::size_t n : w)
      if (n == 0) throw std::invalid_argument("MLP widths must be positive");
    std::size_t offset = 0;
    auto add = [&](std::size_t in, std::size_t out) {
      Layer l{offset, offset + in * out, in, out};
      offset += in * out + out;
      return l;
    };
    if (config_.variant == Variant::modified) {
      for (std::size_t i = 2; i + 1 < w.size(); ++i)
        if (w[i] != w[1]) throw std::invalid_argument("modified MLP needs equal hidden widths");
      encoder_u_ = add(w[0], w[1]);
      encoder_v_ = add(w[0], w[1]);
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) layers_.push_back(add(w[i], w[i + 1]));
    size_ = offset;
  }

  const MlpConfig& config() const noexcept { return config_; }
  std::size_t parameter_count() const noexcept { return size_; }
  std::size_t input_dim() const { return config_.widths.front(); }
  std::size_t output_dim() const { return config_.widths.back(); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& encoder_u() const { return encoder_u_; }
  const Layer& encoder_v() const { return encoder_v_; }

  /// Glorot-uniform weights, zero biases.
  void initialize(Rng& rng, std::span<double> params) const {
    if (params.size() != size_) throw std::invalid_argument("Mlp::initialize: parameter count mismatch");
    auto fill = [&](const Layer& l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
      for (std::size_t k = 0; k < l.in * l.out; ++k) params[l.w + k] = rng.uniform(-limit, limit);
      for (std::size_t k = 0; k < l.out; ++k) params[l.b + k] = 0.0;
    };
    if (config_.variant == Variant::modified) {
      fill(encoder_u_);
      fill(encoder_v_);
    }
    for (const auto& l : layers_) fill(l);
  }

  /// N is the parameter type (double or Var), X the activation type (N or a
  /// Taylor series over N).
  template <class N, class X>
  std::vector<X> forward(std::span<const N> params, std::span<const X> in) const {
    if (params.size() != size_) throw std::invalid_argument("Mlp::forward: parameter count mismatch");
    if (in.size() != input_dim())
      throw std::invalid_argument("Mlp::forward: input has " + std::to_string(in.size()) + " entries, expected " +
                                  std::to_string(input_dim()));
    const Activation act = config_.activation;
    std::vector<X> u, v;
    if (config_.variant == Variant::modified) {
      u = apply(params, encoder_u_, in);
      v = apply(params, encoder_v_, in);
      for (auto& e : u) e = activate(act, e);
      for (auto& e : v) e = activate(act, e);
    }
    std::vector<X> h(in.begin(), in.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      std::vector<X> z = apply(params, layers_[l], std::span<const X>(h));
      if (l + 1 == layers_.size()) return z;
      for (std::size_t i = 0; i < z.size(); ++i) {
        X a = activate(act, z[i]);
        z[i] = config_.variant == Variant::modified ? u[i] + a * (v[i] - u[i]) : a;
      }
      h = std::move(z);
    }
    return h;
  }

 private:
  template <class N, class X>
  static std::vector<X> apply(std::span<const N> params, const Layer& l, std::span<const X> in) {
    std::vector<X> out(l.out);
    ad::affine(params.subspan(l.w, l.in * l.out), params.subspan(l.b, l.out), in, std::span<X>(out));
    return out;
  }

  MlpConfig config_;
  std::vector<Layer> layers_;
  Layer encoder_u_{};
  Layer encoder_v_{};
  std::size_t size_ = 0;
};

}  // namespace lps::nets
