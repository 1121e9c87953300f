#include <cmath>

#include "doctest.h"
#include "spdc/errors.hpp"
#include "spdc/geometry.hpp"

using namespace spdc;

namespace {

OpticalStack stack(AxisOrientation cfg = AxisOrientation::parallel, double gap = 0.5) {
  return OpticalStack::standard("bbo", deg_to_rad(28.8), 6.0, 6.0, gap, 1.0, "yvo4", 3.6, OpticAxis::horizontal(),
                                cfg, 3.25);
}

const double kRhoP = deg_to_rad(3.85068552075);
const double kRhoS = deg_to_rad(3.63957291128);

}  // namespace

TEST_CASE("snell refraction and slant path") {
  CHECK(rad_to_deg(refract_external_to_internal(deg_to_rad(1.0), 1.66)) ==
        doctest::Approx(0.602390152685).epsilon(1e-11));
  CHECK(path_length_in_element(6.0, deg_to_rad(0.6)) == doctest::Approx(6.00032900185).epsilon(1e-11));
  CHECK(refract_external_to_internal(0.0, 1.7) == 0.0);
}

TEST_CASE("refraction conserves the transverse wavevector") {
  double n = 0.0;
  const auto iso = [](const Vec3&) { return 1.6; };
  const Vec3 u = refract_into(0.01, -0.02, iso, &n);
  CHECK(n == 1.6);
  CHECK(n * u.x == doctest::Approx(0.01));
  CHECK(n * u.y == doctest::Approx(-0.02));
  CHECK(dot(u, u) == doctest::Approx(1.0));
  // direction-dependent index converges to a self-consistent point
  const auto aniso = [](const Vec3& v) { return 1.6 + 0.1 * v.y; };
  const Vec3 w = refract_into(0.0, 0.05, aniso, &n);
  CHECK(n == doctest::Approx(1.6 + 0.1 * w.y).epsilon(1e-14));
  CHECK(n * w.y == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("emission direction is mirror symmetric") {
  const Vec3 a = EmissionAngle::from_deg(0.3, 0.4).direction();
  const Vec3 b = EmissionAngle::from_deg(-0.3, -0.4).direction();
  CHECK(a.x == doctest::Approx(-b.x));
  CHECK(a.y == doctest::Approx(-b.y));
  CHECK(a.z == doctest::Approx(b.z));
  CHECK(dot(a, a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(EmissionAngle::from_deg(6.0, 0.0).validate(), DomainError);
}

TEST_CASE("standard stack layout") {
  const auto s = stack();
  REQUIRE(s.elements().size() == 6);
  CHECK(s.elements()[0].role == Role::crystal1);
  CHECK(s.elements()[2].role == Role::hwp);
  CHECK(s.elements()[4].role == Role::crystal2);
  CHECK(s.elements()[5].role == Role::compensator);
  CHECK(rad_to_deg(s.cut_angle()) == doctest::Approx(28.8));
  CHECK(s.element(Role::crystal2).optic_axis->unit().y > 0.0);

  const auto a = stack(AxisOrientation::antiparallel);
  CHECK(a.element(Role::crystal2).optic_axis->unit().y == doctest::Approx(-s.element(Role::crystal2).optic_axis->unit().y));
  CHECK(a.element(Role::crystal2).optic_axis->unit().z == doctest::Approx(s.element(Role::crystal2).optic_axis->unit().z));

  const auto bare = s.with_gap_thickness(0.0).with_hwp_thickness(0.0);
  CHECK(bare.elements().size() == 4);
  CHECK(bare.element(Role::hwp).thickness_mm == 0.0);
  CHECK(bare.with_gap_thickness(0.2).elements().size() == 6);
  CHECK(s.with_compensator_thickness(2.0).element(Role::compensator).thickness_mm == 2.0);
  CHECK(s.with_crystal_lengths(12, 12).crystal_length(2) == 12.0);
  CHECK_THROWS_AS(s.with_crystal_lengths(0, 6), InputError);
}

TEST_CASE("stack validation") {
  std::vector<StackElement> wrong{
      {"bbo", 6.0, Role::crystal2, OpticAxis::vertical_plane(0.5)},
      {"hwp", 0.0, Role::hwp, std::nullopt},
      {"bbo", 6.0, Role::crystal1, OpticAxis::vertical_plane(0.5)},
  };
  CHECK_THROWS_AS(OpticalStack(wrong, AxisOrientation::parallel, 1.0), InputError);
  std::swap(wrong[0].role, wrong[2].role);
  CHECK_NOTHROW(OpticalStack(wrong, AxisOrientation::parallel, 1.0));
  CHECK_THROWS_AS(OpticalStack(wrong, AxisOrientation::parallel, 0.0), InputError);
  wrong[1].role = Role::gap;
  CHECK_THROWS_AS(OpticalStack(wrong, AxisOrientation::parallel, 1.0), InputError);
  CHECK_THROWS_AS(role_from_string("mirror"), InputError);
  CHECK(role_from_string(to_string(Role::compensator)) == Role::compensator);
}

TEST_CASE("generation point offsets follow the pump walk-off") {
  const auto s = stack();
  const auto p1 = GenerationPoint::at(s, 1, 2.0, kRhoP);
  CHECK(p1.transverse_offset_mm == doctest::Approx(std::tan(kRhoP) * 2.0));
  const auto p2 = GenerationPoint::at(s, 2, 2.0, kRhoP);
  CHECK(p2.transverse_offset_mm == doctest::Approx(std::tan(kRhoP) * 8.0));
  CHECK_THROWS_AS(GenerationPoint::at(s, 1, 6.5, kRhoP), InputError);
  CHECK_THROWS_AS(GenerationPoint::at(s, 3, 1.0, kRhoP), InputError);
}

TEST_CASE("parallel partners exit at the same position, shifted by the walk-off mismatch") {
  const auto s = stack();
  const double shift = (1.0 - std::tan(kRhoS) / std::tan(kRhoP)) * 6.0;
  CHECK(shift / 6.0 <= 0.06);
  for (double z1 = shift + 0.01; z1 <= 6.0; z1 += 0.37) {
    const GenerationPoint p{1, z1, 0.0};
    const double z2 = partner_depth(p, s, kRhoP, kRhoS);
    CHECK(z2 == doctest::Approx(z1 - shift));
    CHECK(transverse_exit_position(GenerationPoint{2, z2, 0.0}, s, kRhoP, kRhoS) ==
          doctest::Approx(transverse_exit_position(p, s, kRhoP, kRhoS)));
    // and back
    CHECK(partner_depth(GenerationPoint{2, z2, 0.0}, s, kRhoP, kRhoS) == doctest::Approx(z1));
  }
  // near crystal 1's entry the partner clamps to crystal 2's entry face
  CHECK(partner_depth(GenerationPoint{1, 0.0, 0.0}, s, kRhoP, kRhoS) == 0.0);
}

TEST_CASE("anti-parallel families barely overlap") {
  const auto s = stack(AxisOrientation::antiparallel);
  int clamped = 0;
  for (double z1 = 0.0; z1 <= 6.0; z1 += 0.5) {
    const double z2 = partner_depth(GenerationPoint{1, z1, 0.0}, s, kRhoP, kRhoS);
    CHECK(z2 >= 0.0);
    CHECK(z2 <= 6.0);
    if (z2 == 6.0) ++clamped;
  }
  CHECK(clamped >= 11);
}

TEST_CASE("no pump walk-off pairs by relative depth") {
  const auto s = stack().with_crystal_lengths(4.0, 8.0);
  CHECK(partner_depth(GenerationPoint{1, 1.0, 0.0}, s, 0.0, 0.0) == doctest::Approx(2.0));
  CHECK(partner_depth(GenerationPoint{2, 2.0, 0.0}, s, 0.0, 0.0) == doctest::Approx(1.0));
}
