#include "spdc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "spdc/errors.hpp"

namespace spdc {

const char* to_string(Role role) {
  switch (role) {
    case Role::crystal1: return "crystal1";
    case Role::hwp: return "hwp";
    case Role::crystal2: return "crystal2";
    case Role::gap: return "gap";
    case Role::compensator: return "compensator";
  }
  return "?";
}

Role role_from_string(const std::string& text) {
  for (Role r : {Role::crystal1, Role::hwp, Role::crystal2, Role::gap, Role::compensator})
    if (text == to_string(r)) return r;
  throw InputError("unknown stack role '" + text + "'");
}

double OpticAxis::tilt() const { return std::acos(std::clamp(direction.z, -1.0, 1.0)); }

OpticAxis OpticAxis::vertical_plane(double tilt_rad) { return {{0.0, std::sin(tilt_rad), std::cos(tilt_rad)}}; }
OpticAxis OpticAxis::horizontal() { return {{1.0, 0.0, 0.0}}; }
OpticAxis OpticAxis::vertical() { return {{0.0, 1.0, 0.0}}; }

OpticalStack::OpticalStack(std::vector<StackElement> elements, AxisOrientation axis_configuration,
                           double angle_position_scale_mm_per_deg)
    : elements_(std::move(elements)), axis_configuration_(axis_configuration), scale_(angle_position_scale_mm_per_deg) {
  validate();
}

void OpticalStack::validate() const {
  int c1 = 0, c2 = 0, hwp = 0;
  std::size_t i1 = 0, i2 = 0, ih = 0;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    const bool may_vanish = e.role == Role::hwp || e.role == Role::compensator;
    const bool ok = may_vanish ? e.thickness_mm >= 0.0 : e.thickness_mm > 0.0;
    if (!ok)
      throw InputError(std::string("stack element '") + to_string(e.role) + "' must have positive thickness");
    switch (e.role) {
      case Role::crystal1: ++c1; i1 = i; break;
      case Role::crystal2: ++c2; i2 = i; break;
      case Role::hwp: ++hwp; ih = i; break;
      default: break;
    }
  }
  if (c1 != 1 || c2 != 1) throw InputError("stack needs exactly one crystal1 and one crystal2");
  if (hwp != 1) throw InputError("stack needs exactly one hwp");
  if (!(i1 < ih && ih < i2)) throw InputError("stack order must be crystal1, hwp, crystal2");
  if (!(scale_ > 0.0)) throw InputError("angle_position_scale must be positive");
  for (Role r : {Role::crystal1, Role::crystal2})
    if (!elements_[r == Role::crystal1 ? i1 : i2].optic_axis)
      throw InputError(std::string(to_string(r)) + " needs an optic axis");
}

OpticalStack OpticalStack::standard(const std::string& crystal_medium, double cut_angle_rad, double crystal1_mm,
                                    double crystal2_mm, double gap_mm, double hwp_mm,
                                    const std::string& compensator_medium, double compensator_mm,
                                    const OpticAxis& compensator_axis, AxisOrientation axis_configuration,
                                    double angle_position_scale_mm_per_deg) {
  std::vector<StackElement> e;
  e.push_back({crystal_medium, crystal1_mm, Role::crystal1, OpticAxis::vertical_plane(cut_angle_rad)});
  if (gap_mm > 0.0) e.push_back({"air", gap_mm, Role::gap, std::nullopt});
  e.push_back({"hwp", std::max(0.0, hwp_mm), Role::hwp, std::nullopt});
  if (gap_mm > 0.0) e.push_back({"air", gap_mm, Role::gap, std::nullopt});
  const double tilt2 = axis_configuration == AxisOrientation::parallel ? cut_angle_rad : -cut_angle_rad;
  e.push_back({crystal_medium, crystal2_mm, Role::crystal2, OpticAxis::vertical_plane(tilt2)});
  e.push_back({compensator_medium, std::max(0.0, compensator_mm), Role::compensator, compensator_axis});

  OpticalStack stack;
  stack.elements_ = std::move(e);
  stack.axis_configuration_ = axis_configuration;
  stack.scale_ = angle_position_scale_mm_per_deg;
  stack.validate();
  return stack;
}

std::size_t OpticalStack::index_of(Role role) const {
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i].role == role) return i;
  throw InputError(std::string("stack has no ") + to_string(role));
}

bool OpticalStack::has(Role role) const {
  return std::any_of(elements_.begin(), elements_.end(), [&](const auto& e) { return e.role == role; });
}

double OpticalStack::crystal_length(int which) const {
  return element(which == 1 ? Role::crystal1 : Role::crystal2).thickness_mm;
}

double OpticalStack::cut_angle() const { return element(Role::crystal1).optic_axis->tilt(); }

OpticalStack OpticalStack::with_crystal_lengths(double crystal1_mm, double crystal2_mm) const {
  OpticalStack s = *this;
  s.elements_[index_of(Role::crystal1)].thickness_mm = crystal1_mm;
  s.elements_[index_of(Role::crystal2)].thickness_mm = crystal2_mm;
  if (!(crystal1_mm > 0.0 && crystal2_mm > 0.0)) throw InputError("crystal lengths must be positive");
  return s;
}

OpticalStack OpticalStack::with_gap_thickness(double gap_mm) const {
  OpticalStack s = *this;
  std::vector<StackElement> kept;
  bool had_gap = false;
  for (auto e : elements_) {
    if (e.role == Role::gap) {
      had_gap = true;
      if (gap_mm <= 0.0) continue;
      e.thickness_mm = gap_mm;
    }
    kept.push_back(e);
  }
  if (!had_gap && gap_mm > 0.0) {
    kept.clear();
    for (const auto& e : elements_) {
      kept.push_back(e);
      if (e.role == Role::crystal1 || e.role == Role::hwp) kept.push_back({"air", gap_mm, Role::gap, std::nullopt});
    }
  }
  s.elements_ = std::move(kept);
  return s;
}

OpticalStack OpticalStack::with_hwp_thickness(double hwp_mm) const {
  OpticalStack s = *this;
  s.elements_[index_of(Role::hwp)].thickness_mm = std::max(0.0, hwp_mm);
  return s;
}

OpticalStack OpticalStack::with_compensator_thickness(double thickness_mm) const {
  OpticalStack s = *this;
  if (!has(Role::compensator)) throw InputError("stack has no compensator to resize");
  s.elements_[index_of(Role::compensator)].thickness_mm = std::max(0.0, thickness_mm);
  return s;
}

OpticalStack OpticalStack::with_axis_configuration(AxisOrientation configuration) const {
  OpticalStack s = *this;
  s.axis_configuration_ = configuration;
  const double tilt = cut_angle();
  s.elements_[index_of(Role::crystal2)].optic_axis =
      OpticAxis::vertical_plane(configuration == AxisOrientation::parallel ? tilt : -tilt);
  return s;
}

void GenerationPoint::validate(const OpticalStack& stack) const {
  if (crystal != 1 && crystal != 2) throw InputError("generation crystal must be 1 or 2");
  const double L = stack.crystal_length(crystal);
  if (!(depth_mm >= 0.0 && depth_mm <= L)) throw InputError("generation depth outside the crystal");
}

GenerationPoint GenerationPoint::at(const OpticalStack& stack, int crystal, double depth_mm, double pump_rho) {
  GenerationPoint p{crystal, depth_mm, 0.0};
  p.validate(stack);
  const double tp = std::tan(pump_rho);
  if (crystal == 1) {
    p.transverse_offset_mm = tp * depth_mm;
  } else {
    const double sign = stack.axis_configuration() == AxisOrientation::parallel ? 1.0 : -1.0;
    p.transverse_offset_mm = tp * stack.crystal_length(1) + sign * tp * depth_mm;
  }
  return p;
}

EmissionAngle EmissionAngle::from_deg(double x_deg, double y_deg) { return {deg_to_rad(x_deg), deg_to_rad(y_deg)}; }

void EmissionAngle::validate() const {
  if (std::abs(x_rad) > kValidityLimitRad || std::abs(y_rad) > kValidityLimitRad)
    throw DomainError("emission angle outside the 5 degree model window");
}

Vec3 EmissionAngle::direction() const {
  const double tx = std::tan(x_rad);
  const double ty = std::tan(y_rad);
  const double norm = std::sqrt(1.0 + tx * tx + ty * ty);
  return {tx / norm, ty / norm, 1.0 / norm};
}

double refract_external_to_internal(double alpha_ext_rad, double index) {
  return std::asin(std::sin(alpha_ext_rad) / index);
}

double path_length_in_element(double thickness_mm, double alpha_int_rad) {
  return thickness_mm / std::cos(alpha_int_rad);
}

namespace {

struct ProfileTerms {
  double tp;  // tan ρ_pump
  double ts;  // tan ρ_spdc
  double L1;
  double L2;
  bool parallel;

  // Offsets relative to the pump exit point, positive toward the top.
  double vv(double z1) const {
    return parallel ? tp * (L1 - z1) + (tp - ts) * L2 : tp * (L1 - z1) + (ts - tp) * L2;
  }
  double hh(double z2) const { return parallel ? tp * (L2 - z2) : -tp * (L2 - z2); }
};

ProfileTerms profile_terms(const OpticalStack& stack, double pump_rho, double spdc_rho) {
  return {std::tan(pump_rho), std::tan(spdc_rho), stack.crystal_length(1), stack.crystal_length(2),
          stack.axis_configuration() == AxisOrientation::parallel};
}

}  // namespace

double transverse_exit_position(const GenerationPoint& point, const OpticalStack& stack, double pump_rho,
                                double spdc_rho) {
  point.validate(stack);
  const auto t = profile_terms(stack, pump_rho, spdc_rho);
  return point.crystal == 1 ? t.vv(point.depth_mm) : t.hh(point.depth_mm);
}

double partner_depth(const GenerationPoint& point, const OpticalStack& stack, double pump_rho, double spdc_rho) {
  point.validate(stack);
  const auto t = profile_terms(stack, pump_rho, spdc_rho);
  if (t.tp == 0.0) {
    // No pump walk-off: every pair exits on the pump line; pair by relative depth.
    return point.crystal == 1 ? point.depth_mm * t.L2 / t.L1 : point.depth_mm * t.L1 / t.L2;
  }
  if (point.crystal == 1) {
    const double off = t.vv(point.depth_mm);
    const double z2 = t.parallel ? t.L2 - off / t.tp : t.L2 + off / t.tp;
    return std::clamp(z2, 0.0, t.L2);
  }
  const double off = t.hh(point.depth_mm);
  const double z1 = t.L1 - (off - t.vv(t.L1)) / t.tp;
  return std::clamp(z1, 0.0, t.L1);
}

}  // namespace spdc
