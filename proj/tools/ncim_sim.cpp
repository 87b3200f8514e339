// Monte Carlo driver: runs a preset or a JSON config and writes one CSV per experiment.
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncim/config.hpp"
#include "ncim/experiment.hpp"

namespace {

constexpr int kDeskTrials = 50;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

ncim::SweepAxis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("--sweep expects param=v1,v2,...");
  ncim::SweepAxis axis{text.substr(0, eq), {}};
  for (const auto& v : split(text.substr(eq + 1), ',')) axis.values.push_back(std::stod(v));
  ncim::validate_axis(axis);
  return axis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NC-IM grant-free massive access simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a sweep and write <out>/<experiment>.csv");
  std::string preset_name, config_path, out_dir = "results", algorithms, sweep_text, name;
  int trials = 0, threads = 0;
  std::uint64_t seed = 0;
  bool desk = false;
  auto* preset_opt = run->add_option("--preset", preset_name, "fig5 | fig6 | fig7 | fig8 | fig9");
  auto* config_opt = run->add_option("--config", config_path, "JSON file with SimConfig keys");
  preset_opt->excludes(config_opt);
  run->add_option("--trials", trials, "Trials per sweep point");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--algorithms", algorithms, "Comma-separated subset of stf,stf_slab,ae,bench1,somp");
  run->add_option("--sweep", sweep_text, "Override the sweep, e.g. L=20,30,40");
  run->add_option("--name", name, "Experiment name for --config runs");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_flag("--desk-scale", desk, "Cap trials per point for quick runs");

  auto* list = app.add_subcommand("presets", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& p : ncim::preset_names()) {
        const auto spec = ncim::preset(p);
        std::cout << p << "  sweep " << spec.sweep.param;
        if (spec.outer) std::cout << " x " << spec.outer->param;
        std::cout << "\n";
      }
      return 0;
    }

    ncim::ExperimentSpec spec;
    if (!preset_name.empty()) {
      spec = ncim::preset(preset_name);
    } else if (!config_path.empty()) {
      spec.base = ncim::load_config(config_path);
      spec.name = name.empty() ? "custom" : name;
      spec.sweep = {"snr_db", {spec.base.snr_db}};
    } else {
      std::cerr << "error: one of --preset or --config is required\n";
      return 2;
    }
    if (!name.empty()) spec.name = name;
    if (!sweep_text.empty()) spec.sweep = parse_sweep(sweep_text);
    if (!algorithms.empty()) spec.base.algorithms = split(algorithms, ',');
    if (trials > 0) spec.base.trials = trials;
    if (desk) spec.base.trials = std::min(spec.base.trials, kDeskTrials);
    if (*seed_opt) spec.base.master_seed = seed;
    ncim::require_valid(spec.base);

    const auto path = ncim::run_experiment(spec, out_dir, threads);
    std::cout << path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
