#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "experiments.hpp"
#include "spdc/errors.hpp"
#include "spdc/kv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-crystal SPDC source simulator"};
  std::string config_path;
  std::string experiment;
  std::string lengths;
  spdc::cli::RunOptions options;
  std::string out_dir = ".";
  double grid_step = 0.0;
  app.add_option("--config", config_path, "Source configuration file")->required();
  app.add_option("--experiment", experiment, "Experiment name")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", options.seed, "Seed for noisy experiments");
  auto* step_opt = app.add_option("--grid-step-deg", grid_step, "Phase map grid step (deg)");
  auto* lengths_opt = app.add_option("--lengths", lengths, "Comma-separated crystal lengths (mm) for tradeoff");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto& names = spdc::cli::experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
      std::cerr << "usage error: unknown experiment '" << experiment << "'; valid names:";
      for (const auto& n : names) std::cerr << ' ' << n;
      std::cerr << '\n';
      return 2;
    }
    options.out_dir = out_dir;
    if (*step_opt) options.grid_step_deg = grid_step;
    if (*lengths_opt) {
      std::vector<double> values;
      std::stringstream ss(lengths);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(spdc::parse_double(item));
      options.lengths_mm = values;
    }
    const spdc::SourceConfig config = spdc::load_config(config_path);
    spdc::cli::run_experiment(experiment, config, options, std::cout);
  } catch (const spdc::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
