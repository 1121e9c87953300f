#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/io.hpp"
#include "support.hpp"

using namespace spdc;

namespace {

const char* kMinimal =
    "pump_nm = 405\nsignal_nm = 810\nidler_nm = 810\n"
    "crystal_material = bbo_kato1986\ncut_angle_deg = 29\ncrystal1_mm = 1\ncrystal2_mm = 1\n";

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("shipped default config") {
  const auto& c = test::default_config();
  CHECK(c.pump_nm == 405.0);
  CHECK(c.idler_nm == 837.0);
  CHECK(c.crystal1_mm == 6.0);
  CHECK(c.axis_configuration == AxisOrientation::parallel);
  CHECK(c.tradeoff_lengths_mm == std::vector<double>{3.0, 6.0, 12.0});
  CHECK(c.hash.size() == 16);
  const auto m = test::default_model();
  CHECK(m.stack.elements().size() == 6);
  CHECK(m.media.source_labels().size() == 2);
  CHECK(m.idler().nm() == doctest::Approx(836.644736842));
}

TEST_CASE("degenerate wavelengths parse with defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.signal_nm == 810.0);
  CHECK(c.compensator_material == "yvo4_vendor");
  CHECK_NOTHROW(build_source_model(c));
}

TEST_CASE("energy conservation is checked") {
  std::string t = kMinimal;
  t.replace(t.find("idler_nm = 810"), 14, "idler_nm = 500");
  CHECK(mentions(problems_of(t), "energy conservation"));
}

TEST_CASE("every problem is reported with its line") {
  const std::string t =
      "pump_nm = 405\n"
      "colour = blue\n"
      "signal_nm = 810\n"
      "idler_nm = abc\n"
      "crystal_material = bbo_kato1986\n"
      "cut_angle_deg = 95\n"
      "crystal1_mm = 1\n"
      "[lens]\n";
  const auto p = problems_of(t);
  CHECK(mentions(p, "t.cfg:2: unknown key 'colour'"));
  CHECK(mentions(p, "t.cfg:4: idler_nm"));
  CHECK(mentions(p, "missing key 'crystal2_mm'"));
  CHECK(mentions(p, "cut_angle_deg must lie in (0, 90)"));
  CHECK(mentions(p, "t.cfg:8: unknown section [lens]"));
  CHECK(p.size() >= 5);
}

TEST_CASE("hash ignores layout and comments but not values") {
  const auto a = parse_config(kMinimal);
  std::string shuffled = "# comment\n\ncrystal2_mm = 1\n   pump_nm=405  \n";
  shuffled += "signal_nm = 810\nidler_nm = 810\ncrystal_material = bbo_kato1986\ncut_angle_deg = 29\ncrystal1_mm = 1\n";
  CHECK(parse_config(shuffled).hash == a.hash);
  std::string changed = kMinimal;
  changed.replace(changed.find("cut_angle_deg = 29"), 18, "cut_angle_deg = 30");
  CHECK(parse_config(changed).hash != a.hash);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("explicit element stack") {
  std::string t = kMinimal;
  t += "[element]\nmedium = bbo_kato1986\nthickness_mm = 1\nrole = crystal1\n"
       "[element]\nmedium = hwp\nthickness_mm = 0.5\nrole = hwp\n"
       "[element]\nmedium = bbo_kato1986\nthickness_mm = 1\nrole = crystal2\n"
       "[element]\nmedium = yvo4_vendor\nthickness_mm = 0.6\nrole = compensator\n";
  const auto c = parse_config(t);
  REQUIRE(c.elements.size() == 4);
  const auto m = build_source_model(c);
  CHECK(m.stack.elements().size() == 4);
  CHECK(m.stack.element(Role::compensator).thickness_mm == 0.6);

  std::string bad = kMinimal;
  bad += "[element]\nmedium = glass\nthickness_mm = 1\nrole = crystal1\n";
  CHECK_THROWS_AS(build_source_model(parse_config(bad)), InputError);
  std::string incomplete = kMinimal;
  incomplete += "[element]\nmedium = hwp\nrole = spacer\n";
  const auto p = problems_of(incomplete);
  CHECK(mentions(p, "missing key 'thickness_mm'"));
  CHECK(mentions(p, "unknown stack role 'spacer'"));
}

TEST_CASE("missing config file") { CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError); }

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(321000) == "321000");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("csv writer") {
  CsvWriter w({"a", "b"});
  w.add_row(std::vector<double>{1.5, 2.0});
  w.add_row(std::vector<std::string>{"x", "y"});
  CHECK(w.str() == "a,b\n1.5,2\nx,y\n");
  CHECK_THROWS_AS(w.add_row(std::vector<double>{1.0}), InputError);
}
