#pragma once

#include <string>
#include <vector>

namespace spdc {

/// Square grid of signal emission angles, symmetric about the axis: nodes at
/// i·step for i ∈ [−n, n] in both directions.
struct GridSpec {
  double step_deg = 0.02;
  double half_extent_deg = 1.0;

  int half_count() const;
  int side() const { return 2 * half_count() + 1; }
  double extent_deg() const { return half_count() * step_deg; }
  void validate() const;
};

struct PhaseMapMetadata {
  std::string config_hash;
  std::vector<std::string> sellmeier_labels;
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  double idler_nm = 0.0;
  double global_offset_rad = 0.0;
  std::string depth_mode;
  /// Largest analytic position-residual bound over the grid.
  double residual_bound_rad = 0.0;
  /// Radial compensation coefficients c_k of Σ c_k·r^k (r in degrees); empty
  /// when uncompensated.
  std::vector<double> radial_profile;
};

/// Δφ over (αx, αy) in radians, continuous (unwrapped) across the grid.
class PhaseMap {
 public:
  PhaseMap(GridSpec grid, std::vector<double> values, PhaseMapMetadata metadata = {});

  const GridSpec& grid() const { return grid_; }
  int side() const { return side_; }
  double angle_deg(int index) const;
  double at(int ix, int iy) const { return values_[static_cast<std::size_t>(iy) * side_ + ix]; }
  double center() const { return at(side_ / 2, side_ / 2); }
  const std::vector<double>& values() const { return values_; }

  bool covers(double ax_deg, double ay_deg) const;
  /// Bilinear interpolation; throws DomainError outside the grid.
  double sample(double ax_deg, double ay_deg) const;

  const PhaseMapMetadata& metadata() const { return metadata_; }
  PhaseMapMetadata& metadata() { return metadata_; }

 private:
  GridSpec grid_;
  int side_;
  std::vector<double> values_;
  PhaseMapMetadata metadata_;
};

/// Throws DiagnosticError naming the first pair of neighbouring cells whose
/// values differ by π or more (grid too coarse to resolve the phase).
void check_continuity(const PhaseMap& map);

/// Flood-fill unwrapping of a row-major side×side grid of wrapped phases,
/// starting from the centre cell, which keeps its value. Each cell is
/// unwrapped against an already-visited neighbour.
std::vector<double> unwrap_flood_fill(const std::vector<double>& wrapped, int side);

/// Wrap into (−π, π].
double wrap_phase(double phase);

}  // namespace spdc
