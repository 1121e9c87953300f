#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/collection.hpp"
#include "spdc/geometry.hpp"
#include "spdc/kv.hpp"
#include "spdc/phase.hpp"

namespace spdc {

/// One `[element]` block of an explicit stack.
struct ElementConfig {
  std::string medium;
  double thickness_mm = 0.0;
  Role role = Role::gap;
};

/// Source description read from a flat key-value file. Without `[element]`
/// blocks the standard stack is built from the scalar keys.
struct SourceConfig {
  double pump_nm = 405.0;
  double signal_nm = 785.0;
  double idler_nm = 837.0;
  double signal_bandwidth_nm = 25.0;

  std::string crystal_material = "bbo_kato1986";
  double cut_angle_deg = 28.8;
  double crystal1_mm = 6.0;
  double crystal2_mm = 6.0;
  double gap_mm = 0.5;
  double hwp_mm = 1.0;
  double hwp_index = 1.5;
  std::string compensator_material = "yvo4_vendor";
  double compensator_mm = 3.6;
  std::string compensator_axis = "horizontal";
  AxisOrientation axis_configuration = AxisOrientation::parallel;
  std::vector<ElementConfig> elements;

  double global_offset_rad = 3.14159265358979323846;
  double angle_position_scale_mm_per_deg = 3.25;
  double emission_sigma_deg = 0.17;
  double r_max = 321000.0;
  double reference_length_mm = 6.0;

  double grid_step_deg = 0.02;
  double grid_half_extent_deg = 1.0;
  int depth_samples = 16;
  DepthMode depth_mode = DepthMode::averaged;
  double depth_mm = 0.0;

  double iris_diameter_mm = 0.65;
  double iris_diameter_sigma_mm = 0.10;
  double iris_scan_max_mm = 2.5;
  double iris_scan_step_mm = 0.05;
  std::vector<double> aperture_diameters_mm;
  std::vector<double> tradeoff_lengths_mm{3.0, 6.0, 12.0};
  double radial_fit_radius_deg = 0.3;
  double compensator_search_lo_mm = 0.5;
  double compensator_search_hi_mm = 8.0;
  int spectral_samples = 51;
  double polarizer_noise = 0.02;
  double polarizer_step_deg = 5.0;
  double pair_to_singles_ratio = 0.187;
  double detector_efficiency = 0.45;

  std::string sellmeier_dir;  // empty: library default
  std::string hash;            // FNV-1a 64 of the canonical text, hex

  GridSpec grid() const { return {grid_step_deg, grid_half_extent_deg}; }
  DepthSpec depth() const { return {depth_mode, depth_samples, depth_mm}; }
  EmissionProfile emission_profile() const { return {emission_sigma_deg, r_max, false}; }
  /// Diameters for the aperture sweeps; a default ladder when unset.
  std::vector<double> diameters() const;
};

/// Parses and validates; every problem (with its line number) is collected
/// into one ConfigError.
SourceConfig parse_config(std::string_view text, std::string_view origin = "<memory>");
SourceConfig load_config(const std::filesystem::path& path);

/// Loads the Sellmeier sets and assembles the stack.
SourceModel build_source_model(const SourceConfig& config);

/// Sorted `key=value` lines of the top level, then each section in order.
std::string canonical_text(const KeyValueDocument& doc);
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace spdc
