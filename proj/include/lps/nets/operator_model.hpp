#pragma once

// Branch/trunk operator model: the prediction for an initial condition f at
// (t, x) is <branch(f(s_1), ..., f(s_Ns)), trunk(x, t)>.
//
// The trunk takes its inputs in jet-layout order (x, t). Parameters are one
// flat vector, branch first, then trunk.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lps/autodiff/affine.hpp"
#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/taylor.hpp"
#include "lps/nets/mlp.hpp"
#include "lps/util/random.hpp"

namespace lps::nets {

struct OperatorConfig {
  MlpConfig branch;
  MlpConfig trunk;
  std::vector<double> sensors;  // spatial sensor locations, fixed per model
  bool normalize_sensors = false;
  double sensor_shift = 0.0;  // applied as (f - shift) / scale when normalizing
  double sensor_scale = 1.0;
  std::uint64_t seed = 0;
};

/// depth hidden layers of the given width for both nets, embedding dim d.
inline OperatorConfig make_operator_config(std::vector<double> sensors, std::size_t depth, std::size_t width,
                                           std::size_t d, Activation act = Activation::elu,
                                           Variant variant = Variant::plain) {
  OperatorConfig c;
  c.branch.widths.push_back(sensors.size());
  c.trunk.widths.push_back(2);
  for (std::size_t i = 0; i < depth; ++i) {
    c.branch.widths.push_back(width);
    c.trunk.widths.push_back(width);
  }
  c.branch.widths.push_back(d);
  c.trunk.widths.push_back(d);
  c.branch.activation = c.trunk.activation = act;
  c.branch.variant = c.trunk.variant = variant;
  c.sensors = std::move(sensors);
  return c;
}

/// 7 hidden layers of width 100, elu, d = 100.
inline OperatorConfig default_operator_config(std::vector<double> sensors) {
  return make_operator_config(std::move(sensors), 7, 100, 100);
}

class OperatorModel {
 public:
  OperatorModel() = default;

  explicit OperatorModel(OperatorConfig config) : config_(std::move(config)) {
    if (config_.sensors.empty()) throw std::invalid_argument("operator model needs at least one sensor");
    if (config_.branch.widths.empty() || config_.branch.widths.front() != config_.sensors.size())
      throw std::invalid_argument("branch input width must equal the sensor count");
    if (config_.trunk.widths.empty() || config_.trunk.widths.front() != 2)
      throw std::invalid_argument("trunk input width must be 2 (x, t)");
    if (config_.branch.widths.back() != config_.trunk.widths.back())
      throw std::invalid_argument("branch and trunk embedding dimensions differ");
    if (config_.normalize_sensors && !(config_.sensor_scale > 0.0))
      throw std::invalid_argument("sensor_scale must be positive");
    branch_ = Mlp(config_.branch);
    trunk_ = Mlp(config_.trunk);
  }

  const OperatorConfig& config() const noexcept { return config_; }
  OperatorConfig& mutable_config() noexcept { return config_; }
  const Mlp& branch() const noexcept { return branch_; }
  const Mlp& trunk() const noexcept { return trunk_; }
  std::size_t sensor_count() const noexcept { return config_.sensors.size(); }
  std::size_t embedding_dim() const { return config_.trunk.widths.back(); }
  std::size_t parameter_count() const noexcept { return branch_.parameter_count() + trunk_.parameter_count(); }

  template <class N>
  std::span<const N> branch_params(std::span<const N> params) const {
    return params.subspan(0, branch_.parameter_count());
  }
  template <class N>
  std::span<const N> trunk_params(std::span<const N> params) const {
    return params.subspan(branch_.parameter_count(), trunk_.parameter_count());
  }

  std::vector<double> initial_parameters() const {
    std::vector<double> p(parameter_count());
    Rng rng(config_.seed);
    branch_.initialize(rng, std::span<double>(p).subspan(0, branch_.parameter_count()));
    trunk_.initialize(rng, std::span<double>(p).subspan(branch_.parameter_count()));
    return p;
  }

  /// Branch embedding of one initial condition.
  template <class N>
  std::vector<N> embed(std::span<const N> params, std::span<const double> sensor_values) const {
    check(params);
    if (sensor_values.size() != sensor_count())
      throw std::invalid_argument("got " + std::to_string(sensor_values.size()) + " sensor values, model expects " +
                                  std::to_string(sensor_count()));
    std::vector<N> in(sensor_values.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double f = sensor_values[i];
      in[i] = N(config_.normalize_sensors ? (f - config_.sensor_shift) / config_.sensor_scale : f);
    }
    return branch_.forward<N, N>(branch_params(params), in);
  }

  /// Trunk embedding at coordinates (x, t) given as N or Taylor<N, P>.
  template <class N, class X>
  std::vector<X> features(std::span<const N> params, const std::array<X, 2>& xt) const {
    check(params);
    return trunk_.forward<N, X>(trunk_params(params), std::span<const X>(xt));
  }

  /// <e, g>, with e an embedding and g trunk features of matching type.
  template <class N, class X>
  static X combine(std::span<const N> e, std::span<const X> g) {
    X out[1];
    ad::affine(e, std::span<const N>(), g, std::span<X>(out, 1));
    return out[0];
  }

  /// Prediction for one (t, x) in double precision.
  double predict(std::span<const double> params, std::span<const double> sensor_values, double t, double x) const {
    const auto e = embed<double>(params, sensor_values);
    const auto g = features<double, double>(params, std::array<double, 2>{x, t});
    return combine<double, double>(e, g);
  }

  /// Jet of the prediction at (t, x) up to `order` for a precomputed embedding.
  template <class N>
  ad::Jet<N, 2> jet(std::span<const N> params, std::span<const N> embedding, double t, double x, int order) const {
    using T = ad::Taylor<N, 2>;
    return ad::jet_of<N, 2>(
        [&](const std::array<T, 2>& seeds) {
          const auto g = features<N, T>(params, seeds);
          return combine<N, T>(embedding, g);
        },
        {x, t}, order);
  }

 private:
  template <class N>
  void check(std::span<const N> params) const {
    if (params.size() != parameter_count())
      throw std::invalid_argument("model has " + std::to_string(parameter_count()) + " parameters, got " +
                                  std::to_string(params.size()));
  }

  OperatorConfig config_;
  Mlp branch_;
  Mlp trunk_;
};

}  // namespace lps::nets
