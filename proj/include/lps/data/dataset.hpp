#pragma once

// Datasets of initial conditions with sensor samples, initial/boundary
// supervision, interior collocation points and reference solutions.
//
// Sensor and supervision positions are shared by every initial condition:
// N_s equispaced sensors at t = 0 and N_l - N_s boundary samples split
// between x = 0 and x = L at evenly spaced grid times. Collocation points are
// drawn per initial condition, without replacement, from interior grid nodes;
// N_r is the total over the training set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "lps/data/burgers_solver.hpp"
#include "lps/data/initial_condition.hpp"
#include "lps/util/blob_file.hpp"
#include "lps/util/random.hpp"

namespace lps::data {

inline constexpr int kDatasetFormatVersion = 1;

struct DatasetConfig {
  std::string pde = "heat";
  double nu = 0.01;
  Grid grid;
  IcSampling sampling;
  std::size_t n_train = 100;  // N_f
  std::size_t n_val = 100;
  std::size_t n_test = 300;
  std::size_t n_collocation = 500;  // N_r, total over the training set
  std::size_t n_sensors = 200;      // N_s
  std::size_t n_supervision = 300;  // N_l, including the N_s initial points
  std::uint64_t seed = 0;

  void validate() const {
    grid.validate();
    if (pde != "heat" && pde != "burgers") throw std::invalid_argument("dataset: unknown PDE '" + pde + "'");
    if (!(nu > 0.0)) throw std::invalid_argument("dataset: nu must be positive");
    if (pde == "burgers" && !is_power_of_two(grid.nx))
      throw std::invalid_argument("dataset: Burgers needs nx to be a power of two");
    if (n_train == 0) throw std::invalid_argument("dataset: need at least one training initial condition");
    if (n_sensors == 0) throw std::invalid_argument("dataset: need at least one sensor");
    if (n_supervision < n_sensors) throw std::invalid_argument("dataset: N_l must be at least N_s");
    const std::size_t per_ic = (n_collocation + n_train - 1) / n_train;
    if (per_ic > (grid.nx - 1) * (grid.nt - 2))
      throw std::invalid_argument("dataset: N_r exceeds the interior grid capacity per initial condition");
  }
};

inline DatasetConfig heat_dataset_defaults() { return {}; }

inline DatasetConfig burgers_dataset_defaults() {
  DatasetConfig c;
  c.pde = "burgers";
  c.nu = 0.1;
  c.grid.T = 2.475;
  c.n_train = 500;
  c.n_collocation = 5000;
  return c;
}

struct IcRecord {
  std::size_t id = 0;  // global index, also the rng stream index
  InitialCondition ic;
  std::vector<double> sensors;    // N_s values at t = 0
  std::vector<double> reference;  // nt x nx
  std::vector<double> sup_u;      // N_l targets (training only)
  std::vector<double> col_x;      // collocation points (training only)
  std::vector<double> col_t;
};

struct Dataset {
  DatasetConfig config;
  std::vector<double> sensor_x;
  std::vector<double> sup_x;  // first N_s entries are the sensor points at t = 0
  std::vector<double> sup_t;
  std::vector<IcRecord> train;
  std::vector<IcRecord> val;
  std::vector<IcRecord> test;

  std::size_t n_initial() const noexcept { return sensor_x.size(); }

  const std::vector<IcRecord>& split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "val") return val;
    if (name == "test") return test;
    throw std::invalid_argument("unknown split '" + name + "' (expected train, val or test)");
  }
};

inline std::vector<double> reference_solution(const DatasetConfig& c, const InitialCondition& ic) {
  return c.pde == "heat" ? heat_grid(ic, c.nu, c.grid) : burgers_spectral_solve(ic, c.nu, c.grid);
}

namespace detail {

// Floyd's sampling of m distinct values from [0, n), in draw order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> out;
  std::unordered_set<std::size_t> seen;
  out.reserve(m);
  for (std::size_t j = n - m; j < n; ++j) {
    const std::size_t r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(j)));
    const std::size_t pick = seen.count(r) ? j : r;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

inline void boundary_points(const DatasetConfig& c, std::vector<double>& xs, std::vector<double>& ts) {
  const std::size_t nb = c.n_supervision - c.n_sensors;
  const std::size_t left = (nb + 1) / 2;
  const Grid& g = c.grid;
  auto add_side = [&](std::size_t count, double x) {
    for (std::size_t i = 0; i < count; ++i) {
      const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      const auto k = 1 + static_cast<std::size_t>(std::llround(frac * static_cast<double>(g.nt - 2)));
      xs.push_back(x);
      ts.push_back(g.t(k));
    }
  };
  add_side(left, 0.0);
  add_side(nb - left, g.L);
}

}  // namespace detail

inline Dataset build_dataset(const DatasetConfig& c) {
  c.validate();
  const Grid& g = c.grid;
  Dataset d;
  d.config = c;
  for (std::size_t i = 0; i < c.n_sensors; ++i)
    d.sensor_x.push_back(g.L * static_cast<double>(i) / static_cast<double>(c.n_sensors));
  d.sup_x = d.sensor_x;
  d.sup_t.assign(c.n_sensors, 0.0);
  detail::boundary_points(c, d.sup_x, d.sup_t);

  const std::size_t n_ic = c.n_train + c.n_val + c.n_test;
  const std::size_t interior = (g.nx - 1) * (g.nt - 2);
  for (std::size_t id = 0; id < n_ic; ++id) {
    Rng rng = Rng::stream(c.seed, id);
    IcRecord r;
    r.id = id;
    r.ic = sample_initial_condition(rng, g.L, c.sampling);
    for (double x : d.sensor_x) r.sensors.push_back(r.ic(x));
    r.reference = reference_solution(c, r.ic);
    if (id < c.n_train) {
      for (std::size_t i = 0; i < d.sup_x.size(); ++i) {
        if (i < c.n_sensors) {
          r.sup_u.push_back(r.sensors[i]);
        } else {
          const auto k = static_cast<std::size_t>(std::llround(d.sup_t[i] / g.dt()));
          r.sup_u.push_back(r.reference[k * g.nx]);  // x = 0 and x = L coincide on a periodic grid
        }
      }
      const std::size_t m = c.n_collocation / c.n_train + (id < c.n_collocation % c.n_train ? 1 : 0);
      for (std::size_t flat : detail::sample_without_replacement(rng, interior, m)) {
        const std::size_t k = 1 + flat / (g.nx - 1);
        const std::size_t j = 1 + flat % (g.nx - 1);
        r.col_x.push_back(g.x(j));
        r.col_t.push_back(g.t(k));
      }
      d.train.push_back(std::move(r));
    } else if (id < c.n_train + c.n_val) {
      d.val.push_back(std::move(r));
    } else {
      d.test.push_back(std::move(r));
    }
  }
  return d;
}

inline io::json to_json(const DatasetConfig& c) {
  return {{"pde", c.pde},
          {"nu", c.nu},
          {"grid", {{"L", c.grid.L}, {"T", c.grid.T}, {"nx", c.grid.nx}, {"nt", c.grid.nt}, {"periodic", c.grid.periodic}}},
          {"initial_condition",
           {{"K", c.sampling.K},
            {"amplitude", {c.sampling.amplitude.lo, c.sampling.amplitude.hi}},
            {"wavenumber", {c.sampling.l_min, c.sampling.l_max}},
            {"phase", {c.sampling.phase.lo, c.sampling.phase.hi}}}},
          {"N_f", c.n_train},
          {"n_val", c.n_val},
          {"n_test", c.n_test},
          {"N_r", c.n_collocation},
          {"N_s", c.n_sensors},
          {"N_l", c.n_supervision},
          {"seed", c.seed}};
}

/// Missing fields keep the values of `base`.
inline DatasetConfig dataset_config_from_json(const io::json& j, DatasetConfig base) {
  DatasetConfig c = std::move(base);
  c.pde = j.value("pde", c.pde);
  c.nu = j.value("nu", c.nu);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    c.grid.L = g.value("L", c.grid.L);
    c.grid.T = g.value("T", c.grid.T);
    c.grid.nx = g.value("nx", c.grid.nx);
    c.grid.nt = g.value("nt", c.grid.nt);
    c.grid.periodic = g.value("periodic", c.grid.periodic);
  }
  if (j.contains("initial_condition")) {
    const auto& s = j["initial_condition"];
    c.sampling.K = s.value("K", c.sampling.K);
    if (s.contains("amplitude")) c.sampling.amplitude = {s["amplitude"].at(0), s["amplitude"].at(1)};
    if (s.contains("wavenumber")) {
      c.sampling.l_min = s["wavenumber"].at(0);
      c.sampling.l_max = s["wavenumber"].at(1);
    }
    if (s.contains("phase")) c.sampling.phase = {s["phase"].at(0), s["phase"].at(1)};
  }
  c.n_train = j.value("N_f", c.n_train);
  c.n_val = j.value("n_val", c.n_val);
  c.n_test = j.value("n_test", c.n_test);
  c.n_collocation = j.value("N_r", c.n_collocation);
  c.n_sensors = j.value("N_s", c.n_sensors);
  c.n_supervision = j.value("N_l", c.n_supervision);
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace detail {

inline void put_split(io::Blob& blob, const std::string& name, const std::vector<IcRecord>& recs, bool training) {
  std::vector<double> ids, coeffs, sensors, reference, sup, offsets, cx, ct;
  for (const auto& r : recs) {
    ids.push_back(static_cast<double>(r.id));
    for (std::size_t k = 0; k < r.ic.K(); ++k) {
      coeffs.push_back(r.ic.A[k]);
      coeffs.push_back(r.ic.l[k]);
      coeffs.push_back(r.ic.phi[k]);
    }
    sensors.insert(sensors.end(), r.sensors.begin(), r.sensors.end());
    reference.insert(reference.end(), r.reference.begin(), r.reference.end());
    if (training) {
      sup.insert(sup.end(), r.sup_u.begin(), r.sup_u.end());
      offsets.push_back(static_cast<double>(cx.size()));
      cx.insert(cx.end(), r.col_x.begin(), r.col_x.end());
      ct.insert(ct.end(), r.col_t.begin(), r.col_t.end());
    }
  }
  offsets.push_back(static_cast<double>(cx.size()));
  blob.blocks[name + "/id"] = ids;
  blob.blocks[name + "/ic"] = coeffs;
  blob.blocks[name + "/sensors"] = sensors;
  blob.blocks[name + "/reference"] = reference;
  if (training) {
    blob.blocks[name + "/sup_u"] = sup;
    blob.blocks[name + "/col_offsets"] = offsets;
    blob.blocks[name + "/col_x"] = cx;
    blob.blocks[name + "/col_t"] = ct;
  }
}

inline std::vector<IcRecord> get_split(const io::Blob& blob, const std::string& name, const DatasetConfig& c,
                                       std::size_t count, bool training) {
  const auto& ids = blob.block(name + "/id");
  const auto& coeffs = blob.block(name + "/ic");
  const auto& sensors = blob.block(name + "/sensors");
  const auto& reference = blob.block(name + "/reference");
  const std::size_t K = c.sampling.K, ns = c.n_sensors, ng = c.grid.nt * c.grid.nx, nl = c.n_supervision;
  if (ids.size() != count || coeffs.size() != count * 3 * K || sensors.size() != count * ns ||
      reference.size() != count * ng)
    throw io::FormatError("dataset split '" + name + "' has inconsistent block sizes");
  std::vector<IcRecord> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    IcRecord& r = out[i];
    r.id = static_cast<std::size_t>(ids[i]);
    r.ic.L = c.grid.L;
    for (std::size_t k = 0; k < K; ++k) {
      r.ic.A.push_back(coeffs[(i * K + k) * 3]);
      r.ic.l.push_back(static_cast<int>(coeffs[(i * K + k) * 3 + 1]));
      r.ic.phi.push_back(coeffs[(i * K + k) * 3 + 2]);
    }
    r.sensors.assign(sensors.begin() + static_cast<std::ptrdiff_t>(i * ns),
                     sensors.begin() + static_cast<std::ptrdiff_t>((i + 1) * ns));
    r.reference.assign(reference.begin() + static_cast<std::ptrdiff_t>(i * ng),
                       reference.begin() + static_cast<std::ptrdiff_t>((i + 1) * ng));
  }
  if (training) {
    const auto& sup = blob.block(name + "/sup_u");
    const auto& off = blob.block(name + "/col_offsets");
    const auto& cx = blob.block(name + "/col_x");
    const auto& ct = blob.block(name + "/col_t");
    if (sup.size() != count * nl || off.size() != count + 1 || cx.size() != ct.size() ||
        static_cast<std::size_t>(off.back()) != cx.size())
      throw io::FormatError("dataset training blocks have inconsistent sizes");
    for (std::size_t i = 0; i < count; ++i) {
      IcRecord& r = out[i];
      r.sup_u.assign(sup.begin() + static_cast<std::ptrdiff_t>(i * nl),
                     sup.begin() + static_cast<std::ptrdiff_t>((i + 1) * nl));
      const auto a = static_cast<std::ptrdiff_t>(off[i]), b = static_cast<std::ptrdiff_t>(off[i + 1]);
      if (a > b) throw io::FormatError("dataset collocation offsets are not monotone");
      r.col_x.assign(cx.begin() + a, cx.begin() + b);
      r.col_t.assign(ct.begin() + a, ct.begin() + b);
    }
  }
  return out;
}

}  // namespace detail

inline io::Blob to_blob(const Dataset& d) {
  io::Blob blob;
  blob.meta["kind"] = "lps-dataset";
  blob.meta["format_version"] = kDatasetFormatVersion;
  blob.meta["config"] = to_json(d.config);
  blob.meta["seed"] = d.config.seed;
  blob.meta["shapes"] = {{"reference", {d.config.grid.nt, d.config.grid.nx}},
                         {"train", d.train.size()},
                         {"val", d.val.size()},
                         {"test", d.test.size()},
                         {"N_s", d.sensor_x.size()},
                         {"N_l", d.sup_x.size()}};
  blob.meta["layout"] =
      "row-major float64; <split>/ic holds (A, l, phi) per mode; reference is (nt, nx) per initial condition; "
      "collocation of training IC i is col_x/col_t[col_offsets[i]:col_offsets[i+1]]";
  blob.blocks["sensor_x"] = d.sensor_x;
  blob.blocks["sup_x"] = d.sup_x;
  blob.blocks["sup_t"] = d.sup_t;
  detail::put_split(blob, "train", d.train, true);
  detail::put_split(blob, "val", d.val, false);
  detail::put_split(blob, "test", d.test, false);
  return blob;
}

inline Dataset from_blob(const io::Blob& blob) {
  if (blob.meta.value("kind", "") != "lps-dataset") throw io::FormatError("not a dataset file");
  const int version = blob.meta.value("format_version", -1);
  if (version != kDatasetFormatVersion)
    throw io::FormatError("dataset format version " + std::to_string(version) + " is not supported");
  Dataset d;
  d.config = dataset_config_from_json(blob.meta.at("config"), DatasetConfig{});
  d.sensor_x = blob.block("sensor_x");
  d.sup_x = blob.block("sup_x");
  d.sup_t = blob.block("sup_t");
  if (d.sensor_x.size() != d.config.n_sensors || d.sup_x.size() != d.config.n_supervision ||
      d.sup_t.size() != d.sup_x.size())
    throw io::FormatError("dataset point blocks do not match the manifest");
  d.train = detail::get_split(blob, "train", d.config, d.config.n_train, true);
  d.val = detail::get_split(blob, "val", d.config, d.config.n_val, false);
  d.test = detail::get_split(blob, "test", d.config, d.config.n_test, false);
  return d;
}

inline void save_dataset(const Dataset& d, const std::string& path) { io::save_blob(path, to_blob(d)); }
inline Dataset load_dataset(const std::string& path) { return from_blob(io::load_blob(path)); }

}  // namespace lps::data
