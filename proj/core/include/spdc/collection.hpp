#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spdc/phase.hpp"
#include "spdc/phase_map.hpp"
#include "spdc/state.hpp"

namespace spdc {

enum class AperturePlane { before_split, signal_arm };

/// Circular field stop. Positions in the field-stop plane map linearly to
/// signal emission angles through `scale_mm_per_deg`.
struct ApertureSpec {
  double diameter_mm = 0.0;
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  AperturePlane plane = AperturePlane::before_split;
  double scale_mm_per_deg = 1.0;

  static ApertureSpec fully_open(double scale_mm_per_deg);
  bool is_fully_open() const { return !std::isfinite(diameter_mm); }
  double half_angle_deg() const { return 0.5 * diameter_mm / scale_mm_per_deg; }
  double center_x_deg() const { return center_x_mm / scale_mm_per_deg; }
  double center_y_deg() const { return center_y_mm / scale_mm_per_deg; }
  void validate() const;
};

/// Radially symmetric far-field density of signal emission angles, centred
/// on the pump axis. `uniform` replaces the Gaussian by a flat density (only
/// meaningful for fidelity weighting).
struct EmissionProfile {
  double sigma_deg = 0.2;
  double r_max = 1.0;  // pairs/s/mW over the full plane
  bool uniform = false;

  /// Normalised density (per deg²) at radius r.
  double density(double r_deg) const;
  /// R_max ∝ L at unchanged width.
  EmissionProfile scaled_for_length(double reference_length_mm, double length_mm) const;
  void validate() const;
};

/// σ for which a centred disc of the given half-angle holds `fraction` of
/// the Gaussian: 1 − exp(−a²/2σ²) = fraction.
double emission_sigma_for_fraction(double half_angle_deg, double fraction);

/// Weighted mean of F_pure(Δφ) over the aperture disc. A zero diameter
/// returns F_pure at the aperture centre. Throws InputError naming the
/// required map extent when the footprint leaves the grid.
double aperture_fidelity(const PhaseMap& map, const ApertureSpec& aperture, const EmissionProfile& profile,
                         BellTarget target = BellTarget::phi_minus);

struct IrisScanPoint {
  double position_mm = 0.0;
  double fidelity = 0.0;
  double fidelity_lo = 0.0;
  double fidelity_hi = 0.0;
};

/// Vertical iris translation. The band spans the fidelities at d ± σ_d
/// (equal to the nominal value without σ_d).
std::vector<IrisScanPoint> iris_translation_scan(const PhaseMap& map, const std::vector<double>& positions_mm,
                                                 double diameter_mm, double scale_mm_per_deg,
                                                 const EmissionProfile& profile,
                                                 std::optional<double> diameter_sigma_mm = std::nullopt,
                                                 BellTarget target = BellTarget::phi_minus);

/// R_max times the Gaussian mass inside the aperture.
double pair_rate(const ApertureSpec& aperture, const EmissionProfile& profile);

enum class SaturationModel { erf, gaussian_disc };

const char* to_string(SaturationModel model);
SaturationModel saturation_model_from_string(const std::string& text);

struct SaturationFit {
  SaturationModel model = SaturationModel::gaussian_disc;
  double scale = 0.0;
  double width_deg = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool degenerate = false;

  double evaluate(double angle_deg) const;
};

/// Least squares of rate(a) = scale·g(a/width) + offset with g = erf(a/(√2 w))
/// or 1 − exp(−a²/2w²). Needs ≥ 5 points. Constant data returns a degenerate
/// fit (scale 0, offset = mean). Non-convergence, or a width beyond the
/// largest sampled angle (knee not covered), throws DiagnosticError.
SaturationFit fit_saturation_curve(const std::vector<std::pair<double, double>>& data, SaturationModel model);

struct TradeoffOptions {
  EmissionProfile profile;  // at the reference length
  double reference_length_mm = 6.0;
  GridSpec grid;
  DepthSpec depth;
  BellTarget target = BellTarget::phi_minus;
  double qber_threshold_fidelity = 0.85;
  /// Adds a column with a quadratic radial profile fitted on |α| ≤ this radius.
  std::optional<double> radial_fit_radius_deg;
};

struct TradeoffRow {
  double length_mm = 0.0;
  double diameter_mm = 0.0;
  double half_angle_deg = 0.0;
  double rate = 0.0;
  double fidelity = 0.0;
  double qber = 0.0;  // 1 − F, NaN when F < ½
  bool within_qber_threshold = false;
  std::optional<double> fidelity_compensated;
};

std::vector<TradeoffRow> tradeoff_curve(const SourceModel& model, const std::vector<double>& lengths_mm,
                                        const std::vector<double>& diameters_mm, const TradeoffOptions& options);

}  // namespace spdc
