#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "spdc/errors.hpp"
#include "spdc/materials.hpp"

using namespace spdc;

namespace {

const UniaxialMaterial& bbo() {
  static const UniaxialMaterial m = load_uniaxial_material(default_sellmeier_dir(), "bbo_kato1986");
  return m;
}
const UniaxialMaterial& yvo4() {
  static const UniaxialMaterial m = load_uniaxial_material(default_sellmeier_dir(), "yvo4_vendor");
  return m;
}

Wavelength nm(double v) { return Wavelength::from_nm(v); }

}  // namespace

TEST_CASE("bbo ordinary index matches high-precision reference") {
  CHECK(bbo().ordinary.index(nm(532)) == doctest::Approx(1.67421272062).epsilon(1e-10));
  CHECK(bbo().ordinary.index(nm(405)) == doctest::Approx(1.69188689598).epsilon(1e-10));
}

TEST_CASE("yvo4 indices") {
  CHECK(yvo4().ordinary.index(nm(810)) == doctest::Approx(1.97123838108).epsilon(1e-10));
  CHECK(yvo4().extraordinary.index(nm(810)) == doctest::Approx(2.18467607222).epsilon(1e-10));
}

TEST_CASE("effective extraordinary index at the cut angle") {
  CHECK(index_extraordinary_effective(bbo(), nm(405), deg_to_rad(28.8)) ==
        doctest::Approx(1.66028925076).epsilon(1e-10));
  // limits of the ellipsoid
  CHECK(index_extraordinary_effective(bbo(), nm(600), 0.0) == doctest::Approx(bbo().ordinary.index(nm(600))));
  CHECK(index_extraordinary_effective(bbo(), nm(600), kPi / 2) ==
        doctest::Approx(bbo().extraordinary.index(nm(600))));
}

TEST_CASE("normal dispersion inside the valid range") {
  for (const auto* m : {&bbo(), &yvo4()}) {
    for (const auto* s : {&m->ordinary, &m->extraordinary}) {
      double prev = s->index(Wavelength::from_um(s->range_um_min()));
      const int n = 200;
      for (int i = 1; i <= n; ++i) {
        const double um = std::min(s->range_um_max(), s->range_um_min() + (s->range_um_max() - s->range_um_min()) * i / n);
        const double v = s->index(Wavelength::from_um(um));
        REQUIRE(v < prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("sign of birefringence") {
  CHECK(is_negative_uniaxial(bbo()));
  CHECK_FALSE(is_negative_uniaxial(yvo4()));
}

TEST_CASE("walk-off equals the finite-difference index slope") {
  for (double lam : {405.0, 532.0, 785.0, 837.0, 1000.0}) {
    for (double deg = 2.0; deg <= 88.0; deg += 4.3) {
      const double t = deg_to_rad(deg);
      const double h = 1e-6;
      const double n = index_extraordinary_effective(bbo(), nm(lam), t);
      const double dn = (index_extraordinary_effective(bbo(), nm(lam), t + h) -
                         index_extraordinary_effective(bbo(), nm(lam), t - h)) /
                        (2 * h);
      const double expected = std::atan(-dn / n);
      CAPTURE(lam);
      CAPTURE(deg);
      CHECK(walkoff_angle(bbo(), nm(lam), t) == doctest::Approx(expected).epsilon(1e-6));
    }
  }
  CHECK(walkoff_angle(bbo(), nm(500), 0.0) == doctest::Approx(0.0));
  CHECK(walkoff_angle(bbo(), nm(500), kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("walk-off at the design point") {
  const double cut = deg_to_rad(28.8);
  const double rp = walkoff_angle(bbo(), nm(405), cut);
  const double rs = walkoff_angle(bbo(), nm(785), cut);
  const double ri = walkoff_angle(bbo(), conjugate_wavelength(nm(405), nm(785)), cut);
  CHECK(rad_to_deg(rp) == doctest::Approx(3.85068552075).epsilon(1e-9));
  CHECK(rad_to_deg(rs) == doctest::Approx(3.63957291128).epsilon(1e-9));
  CHECK(rad_to_deg(ri) == doctest::Approx(3.63363005824).epsilon(1e-9));
  CHECK(walkoff_mismatch(rp, rs) == doctest::Approx(0.0548246820802).epsilon(1e-8));
  CHECK_THROWS_AS(walkoff_mismatch(0.0, rs), InputError);
}

TEST_CASE("type-I phase matching angle") {
  const double th = type1_phase_matching_angle(bbo(), nm(405), nm(785));
  CHECK(rad_to_deg(th) == doctest::Approx(28.8025700136).epsilon(1e-9));
  // degenerate pair
  const double deg = type1_phase_matching_angle(bbo(), nm(405), nm(810));
  CHECK(rad_to_deg(deg) > 28.0);
  CHECK(rad_to_deg(deg) < 30.0);
  // yvo4 is positive uniaxial, no e -> o + o matching
  CHECK_THROWS_AS(type1_phase_matching_angle(yvo4(), nm(405), nm(810)), DomainError);
}

TEST_CASE("out-of-range wavelength") {
  CHECK_THROWS_AS(bbo().ordinary.index(nm(150)), DomainError);
  CHECK_THROWS_AS(bbo().ordinary.index(nm(2500)), DomainError);
  CHECK_FALSE(bbo().ordinary.in_range(nm(150)));
}

TEST_CASE("coefficient file parsing") {
  const char* good =
      "material = X\nray = ordinary\nform = sellmeier\nb1 = 1.0\nb2 = 0.01\n"
      "range_um_min = 0.3\nrange_um_max = 2.0\nsource_label = test set\n";
  const auto m = parse_sellmeier(good);
  // n^2 = 1 + λ²/(λ² − 0.01)
  CHECK(m.index(Wavelength::from_um(1.0)) == doctest::Approx(std::sqrt(1.0 + 1.0 / 0.99)));
  CHECK(m.source_label() == "test set");
  CHECK_THROWS(parse_sellmeier("material = X\nform = abcd\n"));
  CHECK_THROWS_AS(SellmeierModel("X", Ray::ordinary, SellmeierForm::abcd, {1, 2, 3}, 0.3, 1.0, "bad"),
                  InputError);
  CHECK_THROWS_AS(SellmeierModel("X", Ray::ordinary, SellmeierForm::sellmeier, {1.0, 0.25}, 0.3, 1.0, "pole"),
                  InputError);
}

TEST_CASE("crystal validation") {
  UniaxialCrystal c{bbo(), deg_to_rad(28.8), 6.0, AxisOrientation::parallel};
  CHECK_NOTHROW(c.validate());
  c.thickness_mm = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.thickness_mm = 1.0;
  c.cut_angle_rad = 2.0;
  CHECK_THROWS_AS(c.validate(), InputError);
}
