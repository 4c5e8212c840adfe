// lps: generate datasets, train, evaluate, check symmetries, export plot data.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lps/cli/commands.hpp"

namespace {

using namespace lps;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

cli::ExperimentConfig load_config(const std::string& path, const cli::Overrides& o) {
  return cli::resolve_config(path.empty() ? cli::json::object() : cli::read_json_file(path), o);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Neural PDE solvers with a Lie point symmetry loss"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_dir, arm, generators, split = "test", checkpoint, out_file;
  std::optional<std::uint64_t> seed;
  bool resume = false;

  auto* gen = app.add_subcommand("generate", "Generate a dataset from a config");
  gen->add_option("--config", config_path, "Experiment config (JSON); defaults apply when omitted");
  gen->add_option("--seed", seed, "Override the master seed");
  gen->add_option("--out", out_dir, "Run directory (overrides output_dir)");

  auto* tr = app.add_subcommand("train", "Train an operator model");
  tr->add_option("--config", config_path, "Experiment config (JSON)");
  tr->add_option("--data", data_path, "Dataset file from `generate`")->required();
  tr->add_option("--arm", arm, "sym or baseline")->check(CLI::IsMember({"sym", "baseline"}));
  tr->add_option("--generators", generators, "Comma-separated generator names for the symmetry loss, e.g. v5,v6");
  tr->add_option("--seed", seed, "Override the master seed");
  tr->add_option("--out", out_dir, "Run directory (overrides output_dir)");
  tr->add_flag("--resume", resume, "Continue from <out>/last.ckpt when present");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  ev->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  ev->add_option("--data", data_path, "Dataset file")->required();
  ev->add_option("--split", split, "train, val or test");
  ev->add_option("--out", out_file, "Metrics JSON path");

  std::string pde_name = "heat", source = "analytic";
  std::optional<double> nu, tol;
  std::size_t n_ic = 10, per_ic = 100;
  auto* sc = app.add_subcommand("symcheck", "Classify generators and check the infinitesimal criterion");
  sc->add_option("--pde", pde_name, "heat or burgers")->check(CLI::IsMember({"heat", "burgers"}));
  sc->add_option("--nu", nu, "Viscosity (defaults: heat 0.01, burgers 0.1; dataset source uses the file's)");
  sc->add_option("--source", source, "analytic or dataset")->check(CLI::IsMember({"analytic", "dataset"}));
  sc->add_option("--data", data_path, "Dataset file for --source dataset");
  sc->add_option("--tol", tol, "Criterion tolerance (analytic default 1e-6, dataset default 10x max|Delta|)");
  sc->add_option("--ics", n_ic, "Number of solutions to sample");
  sc->add_option("--points", per_ic, "Jets per solution");
  sc->add_option("--seed", seed, "Seed for jet sampling and classification");
  sc->add_option("--out", out_file, "Report JSON path");

  std::vector<std::string> plot_models;
  std::string times = "0";
  std::size_t ic_index = 0;
  auto* ex = app.add_subcommand("export-plots", "Export ground truth, predictions and time slices");
  ex->add_option("--checkpoint", plot_models, "label=path or path; repeatable")->required();
  ex->add_option("--data", data_path, "Dataset file")->required();
  ex->add_option("--split", split, "train, val or test");
  ex->add_option("--ic", ic_index, "Index of the initial condition within the split");
  ex->add_option("--times", times, "Comma-separated times, snapped to the nearest grid row");
  ex->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (gen->parsed()) {
      cli::Overrides o;
      o.seed = seed;
      if (!out_dir.empty()) o.output_dir = out_dir;
      cli::cmd_generate(load_config(config_path, o), std::cout);
    } else if (tr->parsed()) {
      cli::Overrides o;
      o.seed = seed;
      if (!out_dir.empty()) o.output_dir = out_dir;
      if (!arm.empty()) o.arm = arm;
      if (!generators.empty()) o.generators = split_list(generators);
      cli::cmd_train(load_config(config_path, o), data_path, resume, std::cout);
    } else if (ev->parsed()) {
      if (out_file.empty())
        out_file = (std::filesystem::path(checkpoint).parent_path() / ("metrics_" + split + ".json")).string();
      cli::cmd_eval(checkpoint, data_path, split, out_file, std::cout);
      std::cout << "wrote " << out_file << "\n";
    } else if (sc->parsed()) {
      const std::uint64_t s = seed.value_or(0);
      std::vector<ad::Jet<double, 2>> jets;
      pdes::PdeSystem<2> pde = pdes::make_pde(pde_name, nu.value_or(pde_name == "heat" ? 0.01 : 0.1));
      if (source == "dataset") {
        if (data_path.empty()) throw std::invalid_argument("--source dataset needs --data");
        const auto d = data::load_dataset(data_path);
        if (d.config.pde != pde_name)
          throw std::invalid_argument("dataset holds '" + d.config.pde + "' solutions, not '" + pde_name + "'");
        pde = pdes::make_pde(d.config.pde, d.config.nu);
        jets = cli::dataset_jets(d, s, n_ic, per_ic);
      } else {
        jets = cli::analytic_jets(pde_name, pde.params().at("nu"), s, n_ic, per_ic);
      }
      const auto report = cli::symcheck(pde, source, jets, tol, s);
      std::cout << cli::format_table(report);
      if (!out_file.empty()) cli::write_text(out_file, cli::to_json(report).dump(2) + "\n");
      if (!report.all_pass()) {
        std::cerr << "symcheck: criterion failed for at least one generator at tol " << report.tol << "\n";
        return kRuntimeError;
      }
    } else if (ex->parsed()) {
      std::vector<cli::PlotInput> inputs;
      for (const auto& m : plot_models) {
        const auto eq = m.find('=');
        if (eq == std::string::npos)
          inputs.push_back({std::filesystem::path(m).parent_path().filename().string(), m});
        else
          inputs.push_back({m.substr(0, eq), m.substr(eq + 1)});
        if (inputs.back().label.empty()) inputs.back().label = "model" + std::to_string(inputs.size());
      }
      std::vector<double> ts;
      for (const auto& t : split_list(times)) ts.push_back(std::stod(t));
      cli::cmd_export_plots(inputs, data_path, split, ic_index, ts, out_dir, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const cli::json::exception& e) {
    std::cerr << "error: malformed configuration: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
