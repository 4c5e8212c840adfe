#pragma once

// Experiment configuration: one JSON document with dataset, model and
// training sections. Missing fields take PDE- and arm-dependent defaults;
// the resolved form spells out every field and resolves to itself.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lps/data/dataset.hpp"
#include "lps/nets/checkpoint.hpp"
#include "lps/pdes.hpp"
#include "lps/training/trainer.hpp"
#include "lps/util/blob_file.hpp"

namespace lps::cli {

using io::json;

inline constexpr int kSchemaVersion = 1;

struct ModelSettings {
  std::size_t depth = 7;
  std::size_t width = 100;
  std::size_t embedding = 100;
  nets::Activation activation = nets::Activation::elu;
  nets::Variant variant = nets::Variant::plain;
  bool normalize_sensors = false;
  double sensor_shift = 0.0;
  double sensor_scale = 1.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "run";
  data::DatasetConfig dataset;
  ModelSettings model;
  std::string arm = "sym";
  train::TrainConfig train;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> arm;
  std::optional<std::vector<std::string>> generators;
  std::optional<std::string> output_dir;
};

inline nets::OperatorConfig operator_config(const ExperimentConfig& c, std::vector<double> sensors) {
  auto oc = nets::make_operator_config(std::move(sensors), c.model.depth, c.model.width, c.model.embedding,
                                       c.model.activation, c.model.variant);
  oc.normalize_sensors = c.model.normalize_sensors;
  oc.sensor_shift = c.model.sensor_shift;
  oc.sensor_scale = c.model.sensor_scale;
  oc.seed = c.seed;
  return oc;
}

inline json to_json(const ExperimentConfig& c) {
  const auto& t = c.train;
  return {{"schema_version", kSchemaVersion},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"dataset", data::to_json(c.dataset)},
          {"model",
           {{"depth", c.model.depth},
            {"width", c.model.width},
            {"embedding", c.model.embedding},
            {"activation", nets::to_string(c.model.activation)},
            {"variant", nets::to_string(c.model.variant)},
            {"normalize_sensors", c.model.normalize_sensors},
            {"sensor_shift", c.model.sensor_shift},
            {"sensor_scale", c.model.sensor_scale}}},
          {"train",
           {{"arm", c.arm},
            {"weights", {{"alpha", t.weights.alpha}, {"beta", t.weights.beta}, {"gamma", t.weights.gamma}}},
            {"sym_form", train::to_string(t.sym_form)},
            {"generators", t.generators},
            {"adam", {{"lr", t.adam.lr}, {"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"eps", t.adam.eps}}},
            {"max_iters", t.max_iters},
            {"check_every", t.check_every},
            {"patience", t.patience},
            {"full_batch_limit", t.full_batch_limit},
            {"minibatch", t.minibatch}}}};
}

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("config: unknown key '" + k + "' in " + where);
  }
}

/// Resolves a config document: validates keys, fills defaults, applies overrides.
inline ExperimentConfig resolve_config(const json& j, const Overrides& o = {}) {
  check_keys(j, "config", {"schema_version", "seed", "output_dir", "dataset", "model", "train"});
  const int version = j.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw std::invalid_argument("config schema_version " + std::to_string(version) + " is not supported (expected " +
                                std::to_string(kSchemaVersion) + ")");
  ExperimentConfig c;
  c.seed = o.seed.value_or(j.value("seed", std::uint64_t{0}));
  c.output_dir = o.output_dir.value_or(j.value("output_dir", std::string("run")));

  const json ds = j.value("dataset", json::object());
  check_keys(ds, "dataset",
             {"pde", "nu", "grid", "initial_condition", "N_f", "n_val", "n_test", "N_r", "N_s", "N_l", "seed"});
  const std::string pde = ds.value("pde", std::string("heat"));
  const auto base = pde == "burgers" ? data::burgers_dataset_defaults() : data::heat_dataset_defaults();
  c.dataset = data::dataset_config_from_json(ds, base);
  c.dataset.seed = c.seed;
  c.dataset.validate();

  const json m = j.value("model", json::object());
  check_keys(m, "model",
             {"depth", "width", "embedding", "activation", "variant", "normalize_sensors", "sensor_shift",
              "sensor_scale"});
  c.model.depth = m.value("depth", c.model.depth);
  c.model.width = m.value("width", c.model.width);
  c.model.embedding = m.value("embedding", c.model.embedding);
  c.model.activation = nets::parse_activation(m.value("activation", std::string("elu")));
  c.model.variant = nets::parse_variant(m.value("variant", std::string("plain")));
  c.model.normalize_sensors = m.value("normalize_sensors", c.model.normalize_sensors);
  c.model.sensor_shift = m.value("sensor_shift", c.model.sensor_shift);
  c.model.sensor_scale = m.value("sensor_scale", c.model.sensor_scale);

  const json t = j.value("train", json::object());
  check_keys(t, "train",
             {"arm", "weights", "sym_form", "generators", "adam", "max_iters", "check_every", "patience",
              "full_batch_limit", "minibatch"});
  c.arm = o.arm.value_or(t.value("arm", std::string("sym")));
  const auto system = pdes::make_pde(c.dataset.pde, c.dataset.nu);
  c.train = train::default_train_config(system, c.arm, c.dataset.n_collocation);
  if (t.contains("weights")) {
    const auto& w = t["weights"];
    check_keys(w, "train.weights", {"alpha", "beta", "gamma"});
    c.train.weights.alpha = w.value("alpha", c.train.weights.alpha);
    c.train.weights.beta = w.value("beta", c.train.weights.beta);
    c.train.weights.gamma = w.value("gamma", c.train.weights.gamma);
  }
  if (t.contains("sym_form")) c.train.sym_form = train::parse_sym_form(t["sym_form"]);
  if (t.contains("generators")) c.train.generators = t["generators"].get<std::vector<std::string>>();
  if (o.generators) c.train.generators = *o.generators;
  if (c.train.weights.gamma == 0.0 && (o.generators || t.contains("generators")) && !c.train.generators.empty())
    throw std::invalid_argument("generators were selected but gamma is 0, so there is no symmetry loss");
  if (c.train.weights.gamma == 0.0) c.train.generators.clear();
  if (t.contains("adam")) {
    const auto& a = t["adam"];
    check_keys(a, "train.adam", {"lr", "beta1", "beta2", "eps"});
    c.train.adam.lr = a.value("lr", c.train.adam.lr);
    c.train.adam.beta1 = a.value("beta1", c.train.adam.beta1);
    c.train.adam.beta2 = a.value("beta2", c.train.adam.beta2);
    c.train.adam.eps = a.value("eps", c.train.adam.eps);
  }
  c.train.max_iters = t.value("max_iters", c.train.max_iters);
  c.train.check_every = t.value("check_every", c.train.check_every);
  c.train.patience = t.value("patience", c.train.patience);
  c.train.full_batch_limit = t.value("full_batch_limit", c.train.full_batch_limit);
  c.train.minibatch = t.value("minibatch", c.train.minibatch);
  c.train.seed = c.seed;
  c.train.validate(system, c.dataset.n_collocation > 0);
  return c;
}

inline json read_json_file(const std::string& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) { io::write_file(path, text); }

}  // namespace lps::cli
