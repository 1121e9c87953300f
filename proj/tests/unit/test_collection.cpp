#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <cmath>

#include "doctest.h"
#include "spdc/collection.hpp"
#include "spdc/errors.hpp"
#include "support.hpp"

using namespace spdc;

namespace {

ApertureSpec aperture(double d, double cx = 0.0, double cy = 0.0, double scale = 1.0) {
  ApertureSpec a;
  a.diameter_mm = d;
  a.center_x_mm = cx;
  a.center_y_mm = cy;
  a.scale_mm_per_deg = scale;
  return a;
}

PhaseMap quadratic_map(double kappa, double step, double extent) {
  GridSpec g{step, extent};
  std::vector<double> v(static_cast<std::size_t>(g.side() * g.side()));
  for (int iy = 0; iy < g.side(); ++iy)
    for (int ix = 0; ix < g.side(); ++ix) {
      const double x = (ix - g.half_count()) * step, y = (iy - g.half_count()) * step;
      v[static_cast<std::size_t>(iy * g.side() + ix)] = kPi + kappa * (x * x + y * y);
    }
  return PhaseMap(g, v);
}

const PhaseMap& source_map() {
  static const PhaseMap m = PhaseEngine(test::default_model()).phase_map({0.02, 1.0});
  return m;
}

}  // namespace

TEST_CASE("gaussian mass in a centred disc") {
  const EmissionProfile p{0.2, 1000.0, false};
  for (double a : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    CHECK(pair_rate(aperture(2 * a), p) == doctest::Approx(1000.0 * (1 - std::exp(-a * a / (2 * 0.04)))).epsilon(1e-9));
  }
  const double half = 0.2 * std::sqrt(2 * std::log(2.0));
  CHECK(pair_rate(aperture(2 * half), p) == doctest::Approx(500.0).epsilon(1e-9));
  CHECK(pair_rate(ApertureSpec::fully_open(1.0), p) == 1000.0);
  CHECK(pair_rate(aperture(0.0), p) == 0.0);
}

TEST_CASE("gaussian mass in an offset disc") {
  // |r − c|² / σ² follows a non-central chi-squared law with 2 dof
  const EmissionProfile p{0.2, 1.0, false};
  for (double cy : {0.1, 0.3, 0.6}) {
    for (double a : {0.1, 0.25}) {
      boost::math::non_central_chi_squared law(2.0, cy * cy / 0.04);
      const double expected = boost::math::cdf(law, a * a / 0.04);
      CHECK(pair_rate(aperture(2 * a, 0.0, cy), p) == doctest::Approx(expected).epsilon(1e-6));
      CHECK(pair_rate(aperture(2 * a, cy, 0.0), p) == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("rate grows with the aperture and scales with length") {
  const EmissionProfile p{0.17, 321000.0, false};
  double prev = 0.0;
  for (double d = 0.05; d <= 3.0; d += 0.05) {
    const double r = pair_rate(aperture(d, 0, 0, 3.25), p);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(prev < 321000.0);
  CHECK(p.scaled_for_length(6.0, 12.0).r_max == doctest::Approx(642000.0));
  CHECK(p.scaled_for_length(6.0, 12.0).sigma_deg == p.sigma_deg);
  CHECK_THROWS_AS(pair_rate(aperture(1.0), EmissionProfile{0.2, 1.0, true}), InputError);
}

TEST_CASE("sigma calibration") {
  const double s = emission_sigma_for_fraction(0.3, 0.8);
  CHECK(1 - std::exp(-0.09 / (2 * s * s)) == doctest::Approx(0.8));
  CHECK_THROWS_AS(emission_sigma_for_fraction(0.3, 1.0), InputError);
}

TEST_CASE("fidelity over a quadratic phase with uniform weight") {
  // <cos κr²> over a disc of radius a is sin(κa²)/(κa²)
  const auto map = quadratic_map(10.0, 0.005, 0.5);
  const EmissionProfile flat{0.0, 1.0, true};
  for (double a : {0.1, 0.2, 0.4}) {
    const double u = 10.0 * a * a;
    CHECK(aperture_fidelity(map, aperture(2 * a), flat) == doctest::Approx(0.5 + 0.5 * std::sin(u) / u).epsilon(1e-4));
  }
}

TEST_CASE("aperture fidelity on the source map") {
  const auto& map = source_map();
  const EmissionProfile p{0.17, 1.0, false};
  const double f0 = aperture_fidelity(map, aperture(0.0, 0, 0, 3.25), p);
  CHECK(f0 == doctest::Approx(1.0).epsilon(1e-12));
  // tiny apertures approach the centre value
  CHECK(aperture_fidelity(map, aperture(1e-4, 0, 0, 3.25), p) == doctest::Approx(f0).epsilon(1e-8));
  CHECK(aperture_fidelity(map, aperture(0.65, 0, 0, 3.25), p) >= 0.99);
  // mirror invariance in x
  CHECK(aperture_fidelity(map, aperture(0.5, 0.8, 0.3, 3.25), p) ==
        doctest::Approx(aperture_fidelity(map, aperture(0.5, -0.8, 0.3, 3.25), p)).epsilon(1e-10));
  // wide uniform collection washes the coherence out
  const double wide = aperture_fidelity(map, aperture(2 * 0.95 * 3.25, 0, 0, 3.25), EmissionProfile{0.0, 1.0, true});
  CHECK(wide == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(aperture_fidelity(map, aperture(1.0, 0, 0, 3.25), p, BellTarget::phi_plus) +
                 aperture_fidelity(map, aperture(1.0, 0, 0, 3.25), p) - 1.0) < 1e-9);
}

TEST_CASE("footprint outside the map") {
  const auto map = quadratic_map(1.0, 0.05, 0.5);
  try {
    aperture_fidelity(map, aperture(0.4, 0.0, 0.4), EmissionProfile{});
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("0.6") != std::string::npos);
  }
  CHECK_THROWS_AS(aperture_fidelity(map, ApertureSpec::fully_open(1.0), EmissionProfile{}), InputError);
}

TEST_CASE("iris scan band") {
  const auto& map = source_map();
  const EmissionProfile p{0.17, 1.0, false};
  const auto plain = iris_translation_scan(map, {0.0, 0.5}, 0.65, 3.25, p);
  CHECK(plain[0].fidelity_lo == plain[0].fidelity);
  CHECK(plain[0].fidelity_hi == plain[0].fidelity);
  const auto band = iris_translation_scan(map, {0.0, 0.5, 1.0}, 0.65, 3.25, p, 0.1);
  for (const auto& pt : band) {
    CHECK(pt.fidelity_lo <= pt.fidelity);
    CHECK(pt.fidelity <= pt.fidelity_hi);
  }
  CHECK_THROWS_AS(iris_translation_scan(map, {0.0}, 0.65, 3.25, p, 1.0), InputError);
}

TEST_CASE("saturation fits") {
  std::vector<std::pair<double, double>> data;
  for (double a = 0.0; a <= 1.0; a += 0.05) data.emplace_back(a, 300.0 * (1 - std::exp(-a * a / (2 * 0.04))) + 5.0);
  const auto g = fit_saturation_curve(data, SaturationModel::gaussian_disc);
  CHECK(g.scale == doctest::Approx(300.0).epsilon(1e-6));
  CHECK(g.width_deg == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(g.offset == doctest::Approx(5.0).epsilon(1e-5));
  CHECK(g.evaluate(0.3) == doctest::Approx(300.0 * (1 - std::exp(-0.09 / 0.08)) + 5.0).epsilon(1e-6));
  CHECK_FALSE(g.degenerate);

  const auto e = fit_saturation_curve(data, SaturationModel::erf);
  CHECK(e.residual_norm > 1e-3);
  CHECK(e.residual_norm > g.residual_norm);

  std::vector<std::pair<double, double>> flat;
  for (double a = 0.0; a <= 1.0; a += 0.1) flat.emplace_back(a, 7.0);
  const auto d = fit_saturation_curve(flat, SaturationModel::erf);
  CHECK(d.degenerate);
  CHECK(d.scale == 0.0);
  CHECK(d.offset == doctest::Approx(7.0));
  CHECK_THROWS_AS(fit_saturation_curve({{0, 1}, {1, 2}}, SaturationModel::erf), InputError);

  // points that stop before the knee cannot pin the erf width
  std::vector<std::pair<double, double>> early;
  for (double a = 0.0; a <= 0.3; a += 0.01) early.emplace_back(a, 300.0 * (1 - std::exp(-a * a / (2 * 0.04))));
  CHECK_THROWS_AS(fit_saturation_curve(early, SaturationModel::erf), DiagnosticError);
  CHECK(fit_saturation_curve(early, SaturationModel::gaussian_disc).width_deg == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(saturation_model_from_string("gaussian-disc") == SaturationModel::gaussian_disc);
  CHECK_THROWS_AS(saturation_model_from_string("sigmoid"), InputError);
}

TEST_CASE("tradeoff rows") {
  TradeoffOptions opt;
  opt.profile = {0.17, 321000.0, false};
  opt.grid = {0.02, 0.6};
  opt.radial_fit_radius_deg = 0.3;
  const auto rows = tradeoff_curve(test::default_model(), {6.0, 12.0}, {0.3, 1.0}, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].rate / rows[0].rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rows[3].rate / rows[1].rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rows[0].fidelity > rows[1].fidelity);
  CHECK(rows[2].fidelity < rows[0].fidelity);
  for (const auto& r : rows) {
    REQUIRE(r.fidelity_compensated.has_value());
    CHECK(*r.fidelity_compensated >= r.fidelity - 1e-9);
    CHECK(r.within_qber_threshold == (r.fidelity >= 0.85));
    CHECK(r.qber == doctest::Approx(1.0 - r.fidelity));
  }
  CHECK_THROWS_AS(tradeoff_curve(test::default_model(), {}, {1.0}, opt), InputError);
}
