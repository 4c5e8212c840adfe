#pragma once

// Model checkpoints: the manifest carries the architecture, seed and sensor
// locations; the "params" block holds the flat parameter vector in the layout
// documented in mlp.hpp and operator_model.hpp.

#include <string>
#include <vector>

#include "lps/nets/operator_model.hpp"
#include "lps/util/blob_file.hpp"

namespace lps::nets {

inline constexpr const char* kParameterOrder =
    "branch then trunk; per network layer-major (modified variant: encoder U, encoder V, then layers); "
    "each layer: weights row-major (out x in), then biases";

inline io::json to_json(const MlpConfig& c) {
  return {{"widths", c.widths}, {"activation", to_string(c.activation)}, {"variant", to_string(c.variant)}};
}

inline MlpConfig mlp_config_from_json(const io::json& j) {
  MlpConfig c;
  c.widths = j.at("widths").get<std::vector<std::size_t>>();
  c.activation = parse_activation(j.value("activation", "elu"));
  c.variant = parse_variant(j.value("variant", "plain"));
  return c;
}

// Sensor locations are stored as a block, not in this object.
inline io::json to_json(const OperatorConfig& c) {
  return {{"branch", to_json(c.branch)},
          {"trunk", to_json(c.trunk)},
          {"sensor_count", c.sensors.size()},
          {"normalize_sensors", c.normalize_sensors},
          {"sensor_shift", c.sensor_shift},
          {"sensor_scale", c.sensor_scale},
          {"seed", c.seed}};
}

inline OperatorConfig operator_config_from_json(const io::json& j, std::vector<double> sensors) {
  OperatorConfig c;
  c.branch = mlp_config_from_json(j.at("branch"));
  c.trunk = mlp_config_from_json(j.at("trunk"));
  c.normalize_sensors = j.value("normalize_sensors", false);
  c.sensor_shift = j.value("sensor_shift", 0.0);
  c.sensor_scale = j.value("sensor_scale", 1.0);
  c.seed = j.value("seed", std::uint64_t{0});
  c.sensors = std::move(sensors);
  return c;
}

struct Checkpoint {
  OperatorModel model;
  std::vector<double> params;
  io::Blob extra;  // caller-defined metadata and blocks (optimizer state, history)
};

inline io::Blob to_blob(const OperatorModel& model, std::span<const double> params, io::Blob extra = {}) {
  if (params.size() != model.parameter_count()) throw std::invalid_argument("checkpoint: parameter count mismatch");
  io::Blob blob = std::move(extra);
  blob.meta["kind"] = "lps-operator-model";
  blob.meta["model"] = to_json(model.config());
  blob.meta["parameter_count"] = params.size();
  blob.meta["parameter_order"] = kParameterOrder;
  blob.blocks["params"] = std::vector<double>(params.begin(), params.end());
  blob.blocks["sensors"] = model.config().sensors;
  return blob;
}

inline Checkpoint from_blob(io::Blob blob) {
  if (blob.meta.value("kind", "") != "lps-operator-model") throw io::FormatError("not a model checkpoint");
  Checkpoint c;
  c.model = OperatorModel(operator_config_from_json(blob.meta.at("model"), blob.block("sensors")));
  c.params = blob.block("params");
  if (c.params.size() != c.model.parameter_count())
    throw io::FormatError("checkpoint parameter block does not match the architecture");
  blob.blocks.erase("params");
  blob.blocks.erase("sensors");
  for (const char* k : {"kind", "model", "parameter_count", "parameter_order"}) blob.meta.erase(k);
  c.extra = std::move(blob);
  return c;
}

inline void save_checkpoint(const std::string& path, const OperatorModel& model, std::span<const double> params,
                            io::Blob extra = {}) {
  io::save_blob(path, to_blob(model, params, std::move(extra)));
}

inline Checkpoint load_checkpoint(const std::string& path) { return from_blob(io::load_blob(path)); }

}  // namespace lps::nets
