#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/units.hpp"

namespace spdc {

/// Functional forms understood by SellmeierModel. λ in micrometres.
///   abcd:      n² = b1 + b2/(λ² − b3) − b4·λ²
///   sellmeier: n² = 1 + Σ_k b(2k−1)·λ²/(λ² − b(2k))
enum class SellmeierForm { abcd, sellmeier };

enum class Ray { ordinary, extraordinary };

/// One refractive-index dispersion curve from a published coefficient set.
class SellmeierModel {
 public:
  SellmeierModel(std::string material, Ray ray, SellmeierForm form, std::vector<double> coefficients,
                 double range_um_min, double range_um_max, std::string source_label);

  /// Throws DomainError when λ is outside the valid range.
  double index(Wavelength lambda) const;
  bool in_range(Wavelength lambda) const;

  const std::string& material() const { return material_; }
  Ray ray() const { return ray_; }
  SellmeierForm form() const { return form_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double range_um_min() const { return range_min_; }
  double range_um_max() const { return range_max_; }
  const std::string& source_label() const { return source_label_; }

 private:
  double index_unchecked(double lambda_um) const;

  std::string material_;
  Ray ray_;
  SellmeierForm form_;
  std::vector<double> coefficients_;
  double range_min_;
  double range_max_;
  std::string source_label_;
};

/// Parse the flat `key = value` coefficient format. `origin` is used in error
/// messages only.
SellmeierModel parse_sellmeier(std::string_view text, std::string_view origin = "<memory>");
SellmeierModel load_sellmeier(const std::filesystem::path& path);

/// Ordinary and principal extraordinary dispersion of a uniaxial material.
struct UniaxialMaterial {
  SellmeierModel ordinary;
  SellmeierModel extraordinary;

  const std::string& name() const { return ordinary.material(); }
  /// "<ordinary label>; <extraordinary label>"
  std::string source_label() const;
};

/// Loads `<dir>/<set>.o.txt` and `<dir>/<set>.e.txt`.
UniaxialMaterial load_uniaxial_material(const std::filesystem::path& dir, std::string_view set);

/// Directory holding the shipped coefficient sets.
std::filesystem::path default_sellmeier_dir();

/// True when n_e < n_o at every probe wavelength of the shared valid range.
bool is_negative_uniaxial(const UniaxialMaterial& material, int probes = 64);

enum class AxisOrientation { parallel, antiparallel };

/// A cut crystal plate. cut_angle is the angle between optic axis and the
/// plate normal (nominal propagation direction).
struct UniaxialCrystal {
  UniaxialMaterial material;
  double cut_angle_rad = 0.0;
  double thickness_mm = 1.0;
  AxisOrientation orientation = AxisOrientation::parallel;

  /// Throws InputError when 0 ≤ θ ≤ π/2 or thickness > 0 is violated.
  void validate() const;
};

double index_ordinary(const UniaxialCrystal& crystal, Wavelength lambda);

/// Index ellipsoid: 1/n(θ)² = cos²θ/n_o² + sin²θ/n_e², θ measured from the
/// optic axis.
double index_extraordinary_effective(const UniaxialCrystal& crystal, Wavelength lambda, double theta_prop);
double index_extraordinary_effective(const UniaxialMaterial& material, Wavelength lambda, double theta_prop);

/// Poynting-vector walk-off of the extraordinary wave,
///   tan ρ = (n(θ)²/2)·(1/n_e² − 1/n_o²)·sin 2θ.
/// Positive ρ tilts the energy flow toward increasing θ (away from the optic
/// axis), which is the direction for a negative uniaxial crystal.
double walkoff_angle(const UniaxialCrystal& crystal, Wavelength lambda, double theta_prop);
double walkoff_angle(const UniaxialMaterial& material, Wavelength lambda, double theta_prop);

/// |ρ_pump − ρ_spdc| / |ρ_pump|. Throws InputError when ρ_pump is zero.
double walkoff_mismatch(double pump_rho, double spdc_rho);

/// Type-I (e → o + o) collinear phase-matching angle for the given pump and
/// signal; the idler follows from energy conservation. Throws DomainError
/// when no angle in [0, π/2] matches.
double type1_phase_matching_angle(const UniaxialMaterial& material, Wavelength pump, Wavelength signal);

}  // namespace spdc
