#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdc/materials.hpp"

namespace spdc {

// Coordinates: z is the plate normal (pump direction), x is horizontal (H
// polarization), y is vertical (V polarization, "up"). Every plate face is
// perpendicular to z.

enum class Role { crystal1, hwp, crystal2, gap, compensator };

const char* to_string(Role role);
Role role_from_string(const std::string& text);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Optic axis of a uniaxial plate as an exact unit vector.
struct OpticAxis {
  Vec3 direction{0.0, 0.0, 1.0};

  const Vec3& unit() const { return direction; }
  /// Angle from z (always ≥ 0).
  double tilt() const;
  /// Axis tilted from z toward +y (tilt > 0) or −y (tilt < 0).
  static OpticAxis vertical_plane(double tilt_rad);
  /// Axis perpendicular to z, along x (H) or y (V).
  static OpticAxis horizontal();
  static OpticAxis vertical();
};

struct StackElement {
  std::string medium;
  double thickness_mm = 0.0;
  Role role = Role::gap;
  std::optional<OpticAxis> optic_axis;
};

/// Ordered elements crossed by pump and photons, plus the collimation scale
/// that maps emission angle to position in the field-stop plane.
class OpticalStack {
 public:
  /// Validates: exactly one crystal1, hwp and crystal2, in that order; every
  /// thickness > 0, except that the HWP (ideal rotator) and the compensator
  /// (uncompensated source) may have zero thickness; scale > 0. Throws
  /// InputError otherwise.
  OpticalStack(std::vector<StackElement> elements, AxisOrientation axis_configuration,
               double angle_position_scale_mm_per_deg);

  /// crystal1 → gap → hwp → gap → crystal2 → compensator. Zero gap
  /// thickness omits the gaps. crystal2's axis is mirrored for the
  /// anti-parallel configuration.
  static OpticalStack standard(const std::string& crystal_medium, double cut_angle_rad, double crystal1_mm,
                               double crystal2_mm, double gap_mm, double hwp_mm,
                               const std::string& compensator_medium, double compensator_mm,
                               const OpticAxis& compensator_axis, AxisOrientation axis_configuration,
                               double angle_position_scale_mm_per_deg);

  const std::vector<StackElement>& elements() const { return elements_; }
  AxisOrientation axis_configuration() const { return axis_configuration_; }
  double angle_position_scale() const { return scale_; }

  std::size_t index_of(Role role) const;
  const StackElement& element(Role role) const { return elements_[index_of(role)]; }
  bool has(Role role) const;
  double crystal_length(int which) const;
  double cut_angle() const;

  OpticalStack with_crystal_lengths(double crystal1_mm, double crystal2_mm) const;
  /// Sets every air gap; 0 removes them.
  OpticalStack with_gap_thickness(double gap_mm) const;
  /// Sets the HWP bulk thickness; 0 keeps an ideal zero-thickness rotator.
  OpticalStack with_hwp_thickness(double hwp_mm) const;
  OpticalStack with_compensator_thickness(double thickness_mm) const;
  OpticalStack with_axis_configuration(AxisOrientation configuration) const;

 private:
  OpticalStack() = default;
  void validate() const;

  std::vector<StackElement> elements_;
  AxisOrientation axis_configuration_ = AxisOrientation::parallel;
  double scale_ = 1.0;
};

/// Where a pair was born: crystal 1 (VV pathway) or 2 (HH pathway), depth
/// from the crystal's entry face, and walk-off offset accumulated by the pump
/// before generation.
struct GenerationPoint {
  int crystal = 1;
  double depth_mm = 0.0;
  double transverse_offset_mm = 0.0;

  void validate(const OpticalStack& stack) const;
  /// Fills transverse_offset_mm from the pump walk-off.
  static GenerationPoint at(const OpticalStack& stack, int crystal, double depth_mm, double pump_rho);
};

/// External polar emission angles of the signal; αy > 0 is "up".
struct EmissionAngle {
  double x_rad = 0.0;
  double y_rad = 0.0;

  static constexpr double kValidityLimitRad = 5.0 * 3.14159265358979323846 / 180.0;
  static EmissionAngle from_deg(double x_deg, double y_deg);
  void validate() const;
  /// Transverse direction sines of the external ray (x, y components of the
  /// unit vector along (tan αx, tan αy, 1)).
  Vec3 direction() const;
};

/// Snell at a planar face from air: sin α_ext = n · sin α_int.
double refract_external_to_internal(double alpha_ext_rad, double index);

/// Geometric path t / cos α_int across a plate.
double path_length_in_element(double thickness_mm, double alpha_int_rad);

/// Internal unit wavevector for a ray whose transverse direction sines
/// outside are (sx, sy). `index_of` maps a unit wavevector to the phase index;
/// the transverse wavevector n·u_t = s is conserved across the face.
template <class IndexOf>
Vec3 refract_into(double sx, double sy, IndexOf&& index_of, double* index_out = nullptr);

/// Offset (mm) of a pair's exit point at crystal 2's exit face, measured from
/// the pump's exit point and positive toward the top of the emission
/// profile. Walk-off angles in radians.
double transverse_exit_position(const GenerationPoint& point, const OpticalStack& stack, double pump_rho,
                                double spdc_rho);

/// Depth of the pair in the other crystal whose exit point is nearest to
/// `point`'s, clamped to that crystal.
double partner_depth(const GenerationPoint& point, const OpticalStack& stack, double pump_rho, double spdc_rho);

}  // namespace spdc

#include "spdc/detail/refract_impl.hpp"
