#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spdc/geometry.hpp"
#include "spdc/materials.hpp"
#include "spdc/phase_map.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class Polarization { H, V };

/// HH pairs come from crystal 2, VV pairs from crystal 1 (rotated by the HWP).
enum class Pathway { HH, VV };

/// Optical data for every medium id a stack refers to.
class MediumCatalog {
 public:
  void add_isotropic(const std::string& id, double index);
  void add_uniaxial(const std::string& id, UniaxialMaterial material);

  bool contains(const std::string& id) const { return media_.count(id) != 0; }
  bool is_uniaxial(const std::string& id) const;
  const UniaxialMaterial& uniaxial(const std::string& id) const;
  double isotropic_index(const std::string& id) const;
  /// Source labels of every uniaxial material, sorted.
  std::vector<std::string> source_labels() const;

 private:
  std::map<std::string, std::variant<double, UniaxialMaterial>> media_;
};

/// Everything the phase model needs about one source. The idler wavelength
/// always follows from energy conservation.
struct SourceModel {
  Wavelength pump;
  Wavelength signal;
  double signal_bandwidth_nm = 25.0;
  OpticalStack stack;
  MediumCatalog media;
  double global_offset_rad = kPi;

  Wavelength idler() const { return conjugate_wavelength(pump, signal); }
  const UniaxialMaterial& nonlinear_material() const;
  SourceModel with_stack(OpticalStack s) const;
  /// Throws InputError when a stack medium is missing from the catalog.
  void validate() const;
};

/// Phases (rad) accumulated along one pathway up to the reference plane after
/// the compensator.
struct PathwayPhase {
  Pathway pathway = Pathway::HH;
  double pump = 0.0;
  double signal = 0.0;
  double idler = 0.0;

  double total() const { return pump + signal + idler; }
};

struct WalkoffSummary {
  double pump_rad = 0.0;
  double signal_rad = 0.0;
  double idler_rad = 0.0;
  double signal_mismatch = 0.0;
  double idler_mismatch = 0.0;
};

/// averaged: each pathway's phase averaged uniformly over its own crystal
/// (the phase of the depth-integrated amplitude). single: one crystal-1 depth
/// against its transverse-position partner in crystal 2.
enum class DepthMode { averaged, single };

struct DepthSpec {
  DepthMode mode = DepthMode::averaged;
  /// Midpoint samples per crystal for the averaged mode.
  int samples = 16;
  /// Crystal-1 depth for the single-pathway mode.
  double depth_mm = 0.0;
};

/// Phase model of the two-crystal source.
///
/// Each photon's phase is (2π/λ)·Σ n_j·L_j over the media it crosses, with
/// L_j the ray length t_j / cos α_j along the refracted wavevector and n_j the
/// polarization-appropriate index (extraordinary index taken at the actual
/// angle to the optic axis). The pump is collinear and contributes its phase
/// up to the generation point. Walk-off only decides which crystal-1 and
/// crystal-2 pairs leave the source at the same transverse position. Elements
/// from the compensator onward sit in the collimated beam and are crossed at
/// normal incidence.
///
/// Immutable after construction; every member is safe to call concurrently.
class PhaseEngine {
 public:
  explicit PhaseEngine(SourceModel model, int depth_samples = 16);

  const SourceModel& model() const { return model_; }
  int depth_samples() const { return depth_samples_; }

  /// Throws InputError unless 1/λp = 1/λs + 1/λi within 0.1 %.
  PathwayPhase accumulated_phase(Pathway pathway, double depth_mm, const EmissionAngle& angle, Wavelength signal,
                                 Wavelength idler) const;

  /// Σφ^V − Σφ^H for a crystal-1 pair at `vv_depth` and a crystal-2 pair at
  /// `hh_depth`, without any offset subtraction.
  double raw_delta_phi(double vv_depth, double hh_depth, const EmissionAngle& angle, Wavelength signal) const;

  /// Δφ for the pair born at `point`, compared with its partner in the other
  /// crystal (the pair leaving at the same transverse position). Calibrated
  /// so that the depth-averaged on-axis value at the nominal signal
  /// wavelength equals the global offset.
  double delta_phi(const GenerationPoint& point, const EmissionAngle& angle, Wavelength signal) const;
  double delta_phi(const GenerationPoint& point, const EmissionAngle& angle) const {
    return delta_phi(point, angle, model_.signal);
  }
  /// Explicit pairing, calibrated like delta_phi.
  double delta_phi_between(double vv_depth, double hh_depth, const EmissionAngle& angle, Wavelength signal) const;
  double depth_averaged_delta_phi(const EmissionAngle& angle, Wavelength signal) const;

  /// max − min of Δφ over birth depth at a fixed angle.
  double depth_spread(const EmissionAngle& angle, Wavelength signal) const;
  /// Analytic bound on depth_spread from the walk-off mismatch:
  /// |∂φ_HH/∂z|·Δz_partner + |∂φ_VV/∂z − (L2/L1)·∂φ_HH/∂z|·L1, where
  /// Δz_partner is the range of z₁·L2/L1 − z₂ over partner pairs.
  double position_residual_bound(const EmissionAngle& angle, Wavelength signal) const;
  /// ∂φ/∂z of one pathway (pump gain minus photon loss per mm of depth).
  double depth_phase_slope(Pathway pathway, const EmissionAngle& angle, Wavelength signal) const;

  WalkoffSummary walkoff() const;
  double reference_raw() const { return reference_raw_; }

  PhaseMap phase_map(const GridSpec& grid, const DepthSpec& depth = {}) const;

  /// (λs nm, on-axis depth-averaged Δφ) over the signal bandwidth.
  std::vector<std::pair<double, double>> spectral_phase_profile(int samples = 51) const;

 private:
  double spdc_rho(Wavelength signal) const;
  /// (crystal-1 depth, crystal-2 partner depth) for a pair in either crystal.
  std::pair<double, double> depth_pair(const GenerationPoint& point, Wavelength signal) const;
  /// Midpoint samples of both crystals for the depth average.
  std::vector<std::pair<double, double>> averaged_pairs(Wavelength signal) const;
  /// Pairs at the samples, both faces and the clamp kinks of the partner map.
  std::vector<std::pair<double, double>> spread_pairs(Wavelength signal) const;

  SourceModel model_;
  int depth_samples_;
  double pump_rho_;
  double reference_raw_ = 0.0;
};

double peak_to_peak(const std::vector<std::pair<double, double>>& profile);

struct CompensatorOptimum {
  double thickness_mm = 0.0;
  double spread_uncompensated_rad = 0.0;
  double spread_compensated_rad = 0.0;
  bool degenerate = false;
};

/// Minimises the peak-to-peak of the on-axis spectral phase over compensator
/// thickness in [lo, hi] ⊂ [0, 10] mm (tolerance 1 µm). A flat objective
/// (zero bandwidth) returns the current thickness flagged degenerate; an
/// optimum on the interval boundary throws DiagnosticError.
CompensatorOptimum optimize_compensator_thickness(const SourceModel& model, double lo_mm, double hi_mm,
                                                  int spectral_samples = 51);

/// max over the grid (outside a small on-axis disc) of
/// |(Δφ_L2 − off) − c·(Δφ_L1 − off)| / |c·(Δφ_L1 − off)| with c = L2/L1.
/// `remove_spacers` drops the air gaps and the HWP bulk, which do not scale.
double crystal_length_scaling_check(const SourceModel& model, double l1_mm, double l2_mm, const GridSpec& grid,
                                    bool remove_spacers, double exclusion_deg = 0.05, int depth_samples = 16);

/// Returns the map with profile(r) = Σ c_k·r^k added (r in degrees).
PhaseMap apply_radial_compensation(const PhaseMap& map, const std::vector<double>& coefficients);

/// Least-squares coefficients (indexed by power, up to max(powers)) of a
/// radial profile matching −(Δφ − Δφ(0,0)) for cells with r ≤ fit_radius.
std::vector<double> fit_radial_compensation(const PhaseMap& map, double fit_radius_deg,
                                            const std::vector<int>& powers = {2});

/// Largest centred disc radius (deg, at grid resolution) within which
/// |Δφ − Δφ(0,0)| ≤ tolerance.
double constant_phase_radius(const PhaseMap& map, double tolerance_rad);

/// max over depth pairs of |Δφ(z₁) − Δφ(z₂)| at `angle` for the given
/// configuration.
double depth_contrast(const SourceModel& model, AxisOrientation configuration, const EmissionAngle& angle = {});
/// depth_contrast with crystal 2's axis mirrored.
double antiparallel_contrast(const SourceModel& model);

}  // namespace spdc
