#pragma once

// Per-initial-condition mean squared error over the full reference grid,
// summarized as mean and population standard deviation across the split.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lps/data/dataset.hpp"
#include "lps/nets/operator_model.hpp"
#include "lps/util/blob_file.hpp"

namespace lps::train {

struct SplitMetrics {
  std::string split;
  std::vector<std::size_t> ids;
  std::vector<double> per_ic;
  double mean = 0.0;
  double std = 0.0;
  std::uint64_t point_hash = 0;
  std::size_t points_per_ic = 0;
};

/// Hash of the evaluation grid coordinates and initial-condition ids.
inline std::uint64_t point_hash(const data::Grid& g, const std::vector<data::IcRecord>& split) {
  std::vector<double> v;
  v.reserve(g.nx + g.nt + split.size());
  for (std::size_t j = 0; j < g.nx; ++j) v.push_back(g.x(j));
  for (std::size_t k = 0; k < g.nt; ++k) v.push_back(g.t(k));
  for (const auto& r : split) v.push_back(static_cast<double>(r.id));
  std::vector<unsigned char> bytes(v.size() * sizeof(double));
  std::memcpy(bytes.data(), v.data(), bytes.size());
  return io::fnv1a(bytes.data(), bytes.size());
}

using GridPredictor = std::function<std::vector<double>(const data::IcRecord&)>;

inline SplitMetrics evaluate_with(const std::string& name, const std::vector<data::IcRecord>& split,
                                  const data::Grid& g, const GridPredictor& predict) {
  SplitMetrics m;
  m.split = name;
  m.points_per_ic = g.nt * g.nx;
  m.point_hash = point_hash(g, split);
  for (const auto& r : split) {
    const auto pred = predict(r);
    if (pred.size() != r.reference.size()) throw std::invalid_argument("prediction grid does not match the reference");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - r.reference[i]) * (pred[i] - r.reference[i]);
    m.ids.push_back(r.id);
    m.per_ic.push_back(s / static_cast<double>(pred.size()));
  }
  if (!m.per_ic.empty()) {
    for (double e : m.per_ic) m.mean += e;
    m.mean /= static_cast<double>(m.per_ic.size());
    double var = 0.0;
    for (double e : m.per_ic) var += (e - m.mean) * (e - m.mean);
    m.std = std::sqrt(var / static_cast<double>(m.per_ic.size()));
  }
  return m;
}

/// Trunk features at every grid node, row-major ((k * nx + j) * d + c).
inline std::vector<double> grid_features(const nets::OperatorModel& model, std::span<const double> params,
                                         const data::Grid& g) {
  const std::size_t d = model.embedding_dim();
  std::vector<double> out(g.nt * g.nx * d);
  for (std::size_t k = 0; k < g.nt; ++k)
    for (std::size_t j = 0; j < g.nx; ++j) {
      const auto f = model.features<double, double>(params, std::array<double, 2>{g.x(j), g.t(k)});
      std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>((k * g.nx + j) * d));
    }
  return out;
}

inline std::vector<double> predict_grid(const nets::OperatorModel& model, std::span<const double> params,
                                        std::span<const double> features, std::span<const double> sensor_values) {
  const auto e = model.embed<double>(params, sensor_values);
  const std::size_t d = e.size();
  std::vector<double> out(features.size() / d);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = nets::OperatorModel::combine<double, double>(e, features.subspan(i * d, d));
  return out;
}

inline SplitMetrics evaluate_mse(const nets::OperatorModel& model, std::span<const double> params,
                                 const data::Dataset& d, const std::string& split) {
  const auto features = grid_features(model, params, d.config.grid);
  return evaluate_with(split, d.split(split), d.config.grid,
                       [&](const data::IcRecord& r) { return predict_grid(model, params, features, r.sensors); });
}

inline io::json to_json(const SplitMetrics& m) {
  io::json per = io::json::array();
  for (std::size_t i = 0; i < m.ids.size(); ++i) per.push_back({{"id", m.ids[i]}, {"mse", m.per_ic[i]}});
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.point_hash));
  return {{"split", m.split},          {"mse_mean", m.mean}, {"mse_std", m.std},
          {"n_ic", m.per_ic.size()},   {"points_per_ic", m.points_per_ic},
          {"point_hash", hash},        {"per_ic", per}};
}

inline SplitMetrics metrics_from_json(const io::json& j) {
  SplitMetrics m;
  m.split = j.at("split");
  m.mean = j.at("mse_mean");
  m.std = j.at("mse_std");
  m.points_per_ic = j.at("points_per_ic");
  m.point_hash = std::stoull(j.at("point_hash").get<std::string>(), nullptr, 16);
  for (const auto& e : j.at("per_ic")) {
    m.ids.push_back(e.at("id"));
    m.per_ic.push_back(e.at("mse"));
  }
  return m;
}

}  // namespace lps::train
