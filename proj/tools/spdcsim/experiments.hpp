#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spdc/config.hpp"

namespace spdc::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  std::optional<double> grid_step_deg;
  std::optional<std::vector<double>> lengths_mm;
};

const std::vector<std::string>& experiment_names();

/// Writes `<out>/<name>.csv` and `<out>/<name>.meta`, prints a short summary
/// to `log`. Throws InputError for an unknown name.
void run_experiment(const std::string& name, const SourceConfig& config, const RunOptions& options,
                    std::ostream& log);

}  // namespace spdc::cli
