#pragma once

#include <numbers>

namespace spdc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Vacuum wavelength. Stored in micrometres, the unit of every Sellmeier set.
class Wavelength {
 public:
  constexpr Wavelength() = default;
  static constexpr Wavelength from_um(double um) { return Wavelength(um); }
  static constexpr Wavelength from_nm(double nm) { return Wavelength(nm * 1e-3); }

  constexpr double um() const { return um_; }
  constexpr double nm() const { return um_ * 1e3; }
  constexpr double mm() const { return um_ * 1e-3; }
  /// Vacuum wavenumber 2π/λ in rad/mm.
  constexpr double wavenumber_per_mm() const { return kTwoPi / mm(); }

  friend constexpr bool operator==(Wavelength, Wavelength) = default;

 private:
  constexpr explicit Wavelength(double um) : um_(um) {}
  double um_ = 0.0;
};

/// Wavelength of the third photon given the other two: 1/λ3 = 1/λ1 − 1/λ2.
inline Wavelength conjugate_wavelength(Wavelength pump, Wavelength signal) {
  return Wavelength::from_um(1.0 / (1.0 / pump.um() - 1.0 / signal.um()));
}

}  // namespace spdc
