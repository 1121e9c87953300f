#include "spdc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

std::vector<double> SourceConfig::diameters() const {
  if (!aperture_diameters_mm.empty()) return aperture_diameters_mm;
  std::vector<double> d;
  for (int i = 0; i <= 40; ++i) d.push_back(0.05 * i);
  return d;
}

namespace {

std::string where(std::string_view origin, int line) { return std::string(origin) + ":" + std::to_string(line); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty list item");
    out.push_back(parse_double(item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw InputError("'" + text + "' is not an integer");
  return v;
}

}  // namespace

SourceConfig parse_config(std::string_view text, std::string_view origin) {
  const KeyValueDocument doc = parse_key_values(text, origin);
  SourceConfig c;
  std::vector<std::string> problems;

  using Setter = std::function<void(const std::string&)>;
  const auto num = [](double& field) -> Setter { return [&field](const std::string& v) { field = parse_double(v); }; };
  const auto str = [](std::string& field) -> Setter { return [&field](const std::string& v) { field = v; }; };
  const std::map<std::string, Setter> setters{
      {"pump_nm", num(c.pump_nm)},
      {"signal_nm", num(c.signal_nm)},
      {"idler_nm", num(c.idler_nm)},
      {"signal_bandwidth_nm", num(c.signal_bandwidth_nm)},
      {"crystal_material", str(c.crystal_material)},
      {"cut_angle_deg", num(c.cut_angle_deg)},
      {"crystal1_mm", num(c.crystal1_mm)},
      {"crystal2_mm", num(c.crystal2_mm)},
      {"gap_mm", num(c.gap_mm)},
      {"hwp_mm", num(c.hwp_mm)},
      {"hwp_index", num(c.hwp_index)},
      {"compensator_material", str(c.compensator_material)},
      {"compensator_mm", num(c.compensator_mm)},
      {"compensator_axis", str(c.compensator_axis)},
      {"axis_configuration",
       [&c](const std::string& v) {
         if (v == "parallel")
           c.axis_configuration = AxisOrientation::parallel;
         else if (v == "antiparallel" || v == "anti-parallel")
           c.axis_configuration = AxisOrientation::antiparallel;
         else
           throw InputError("expected parallel or antiparallel, got '" + v + "'");
       }},
      {"global_offset_rad", num(c.global_offset_rad)},
      {"angle_position_scale_mm_per_deg", num(c.angle_position_scale_mm_per_deg)},
      {"emission_sigma_deg", num(c.emission_sigma_deg)},
      {"r_max", num(c.r_max)},
      {"reference_length_mm", num(c.reference_length_mm)},
      {"grid_step_deg", num(c.grid_step_deg)},
      {"grid_half_extent_deg", num(c.grid_half_extent_deg)},
      {"depth_samples", [&c](const std::string& v) { c.depth_samples = parse_int(v); }},
      {"depth_mode",
       [&c](const std::string& v) {
         if (v == "averaged")
           c.depth_mode = DepthMode::averaged;
         else if (v == "single")
           c.depth_mode = DepthMode::single;
         else
           throw InputError("expected averaged or single, got '" + v + "'");
       }},
      {"depth_mm", num(c.depth_mm)},
      {"iris_diameter_mm", num(c.iris_diameter_mm)},
      {"iris_diameter_sigma_mm", num(c.iris_diameter_sigma_mm)},
      {"iris_scan_max_mm", num(c.iris_scan_max_mm)},
      {"iris_scan_step_mm", num(c.iris_scan_step_mm)},
      {"aperture_diameters_mm", [&c](const std::string& v) { c.aperture_diameters_mm = parse_list(v); }},
      {"tradeoff_lengths_mm", [&c](const std::string& v) { c.tradeoff_lengths_mm = parse_list(v); }},
      {"radial_fit_radius_deg", num(c.radial_fit_radius_deg)},
      {"compensator_search_lo_mm", num(c.compensator_search_lo_mm)},
      {"compensator_search_hi_mm", num(c.compensator_search_hi_mm)},
      {"spectral_samples", [&c](const std::string& v) { c.spectral_samples = parse_int(v); }},
      {"polarizer_noise", num(c.polarizer_noise)},
      {"polarizer_step_deg", num(c.polarizer_step_deg)},
      {"pair_to_singles_ratio", num(c.pair_to_singles_ratio)},
      {"detector_efficiency", num(c.detector_efficiency)},
      {"sellmeier_dir", str(c.sellmeier_dir)},
  };

  std::set<std::string> seen;
  for (const auto& e : doc.entries) {
    const auto it = setters.find(e.key);
    if (it == setters.end()) {
      problems.push_back(where(origin, e.line) + ": unknown key '" + e.key + "'");
      continue;
    }
    try {
      it->second(e.value);
      seen.insert(e.key);
    } catch (const std::exception& ex) {
      problems.push_back(where(origin, e.line) + ": " + e.key + ": " + ex.what());
    }
  }
  for (const char* key : {"pump_nm", "signal_nm", "idler_nm", "crystal_material", "cut_angle_deg", "crystal1_mm",
                          "crystal2_mm"})
    if (!seen.count(key)) problems.push_back(std::string(origin) + ": missing key '" + key + "'");

  for (const auto& s : doc.sections) {
    if (s.name != "element") {
      problems.push_back(where(origin, s.line) + ": unknown section [" + s.name + "]");
      continue;
    }
    ElementConfig el;
    bool ok = true;
    for (const char* key : {"medium", "thickness_mm", "role"})
      if (!s.find(key)) {
        problems.push_back(where(origin, s.line) + ": [element] missing key '" + key + "'");
        ok = false;
      }
    for (const auto& e : s.entries) {
      try {
        if (e.key == "medium")
          el.medium = e.value;
        else if (e.key == "thickness_mm")
          el.thickness_mm = parse_double(e.value);
        else if (e.key == "role")
          el.role = role_from_string(e.value);
        else
          throw InputError("unknown key '" + e.key + "'");
      } catch (const std::exception& ex) {
        problems.push_back(where(origin, e.line) + ": [element] " + ex.what());
        ok = false;
      }
    }
    if (ok) c.elements.push_back(el);
  }

  const auto check = [&](bool good, const std::string& what) {
    if (!good) problems.push_back(std::string(origin) + ": " + what);
  };
  if (seen.count("pump_nm") && seen.count("signal_nm") && seen.count("idler_nm")) {
    check(c.pump_nm > 0 && c.signal_nm > 0 && c.idler_nm > 0, "wavelengths must be positive");
    if (c.pump_nm > 0 && c.signal_nm > 0 && c.idler_nm > 0) {
      const double lhs = 1.0 / c.pump_nm;
      const double rhs = 1.0 / c.signal_nm + 1.0 / c.idler_nm;
      std::ostringstream os;
      os << "energy conservation violated: 1/" << c.pump_nm << " != 1/" << c.signal_nm << " + 1/" << c.idler_nm
         << " (relative mismatch " << std::abs(rhs - lhs) / lhs << ", limit 0.001)";
      check(std::abs(rhs - lhs) <= 1e-3 * lhs, os.str());
    }
  }
  check(c.signal_bandwidth_nm >= 0, "signal_bandwidth_nm must be >= 0");
  check(c.cut_angle_deg > 0 && c.cut_angle_deg < 90, "cut_angle_deg must lie in (0, 90)");
  check(c.crystal1_mm > 0 && c.crystal2_mm > 0, "crystal lengths must be positive");
  check(c.gap_mm >= 0, "gap_mm must be >= 0");
  check(c.hwp_mm >= 0, "hwp_mm must be >= 0");
  check(c.hwp_index >= 1, "hwp_index must be >= 1");
  check(c.compensator_mm >= 0, "compensator_mm must be >= 0");
  check(c.compensator_axis == "horizontal" || c.compensator_axis == "vertical",
        "compensator_axis must be horizontal or vertical");
  check(c.angle_position_scale_mm_per_deg > 0, "angle_position_scale_mm_per_deg must be positive");
  check(c.emission_sigma_deg > 0, "emission_sigma_deg must be positive");
  check(c.r_max >= 0, "r_max must be >= 0");
  check(c.reference_length_mm > 0, "reference_length_mm must be positive");
  check(c.grid_step_deg > 0 && c.grid_half_extent_deg >= c.grid_step_deg && c.grid_half_extent_deg <= 5,
        "grid needs step > 0 and step <= half extent <= 5 deg");
  check(c.depth_samples >= 1, "depth_samples must be >= 1");
  check(c.iris_diameter_mm > 0, "iris_diameter_mm must be positive");
  check(c.iris_diameter_sigma_mm >= 0 && c.iris_diameter_sigma_mm <= c.iris_diameter_mm,
        "iris_diameter_sigma_mm must lie in [0, iris_diameter_mm]");
  check(c.iris_scan_max_mm >= 0 && c.iris_scan_step_mm > 0, "iris scan needs max >= 0 and step > 0");
  for (double d : c.aperture_diameters_mm) check(d >= 0, "aperture diameters must be >= 0");
  for (double l : c.tradeoff_lengths_mm) check(l > 0, "tradeoff lengths must be positive");
  check(c.radial_fit_radius_deg > 0, "radial_fit_radius_deg must be positive");
  check(c.compensator_search_lo_mm >= 0 && c.compensator_search_hi_mm <= 10 &&
            c.compensator_search_lo_mm < c.compensator_search_hi_mm,
        "compensator search interval must lie within [0, 10] mm");
  check(c.spectral_samples >= 2, "spectral_samples must be >= 2");
  check(c.polarizer_noise >= 0, "polarizer_noise must be >= 0");
  check(c.polarizer_step_deg > 0 && c.polarizer_step_deg <= 22.5, "polarizer_step_deg must lie in (0, 22.5]");

  if (!problems.empty()) throw ConfigError(problems);
  c.hash = hex64(fnv1a64(canonical_text(doc)));
  return c;
}

SourceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

SourceModel build_source_model(const SourceConfig& c) {
  const std::filesystem::path dir = c.sellmeier_dir.empty() ? default_sellmeier_dir() : std::filesystem::path(c.sellmeier_dir);
  MediumCatalog media;
  media.add_uniaxial(c.crystal_material, load_uniaxial_material(dir, c.crystal_material));
  if (c.compensator_material != c.crystal_material)
    media.add_uniaxial(c.compensator_material, load_uniaxial_material(dir, c.compensator_material));
  media.add_isotropic("air", 1.0);
  media.add_isotropic("hwp", c.hwp_index);

  const double cut = deg_to_rad(c.cut_angle_deg);
  const OpticAxis comp_axis = c.compensator_axis == "horizontal" ? OpticAxis::horizontal() : OpticAxis::vertical();
  std::optional<OpticalStack> stack;
  if (c.elements.empty()) {
    stack = OpticalStack::standard(c.crystal_material, cut, c.crystal1_mm, c.crystal2_mm, c.gap_mm, c.hwp_mm,
                                   c.compensator_material, c.compensator_mm, comp_axis, c.axis_configuration,
                                   c.angle_position_scale_mm_per_deg);
  } else {
    std::vector<StackElement> elements;
    for (const auto& e : c.elements) {
      if (!media.contains(e.medium))
        throw InputError("[element] medium '" + e.medium + "' is not one of the configured media");
      StackElement s{e.medium, e.thickness_mm, e.role, std::nullopt};
      if (media.is_uniaxial(e.medium)) {
        if (e.role == Role::crystal1)
          s.optic_axis = OpticAxis::vertical_plane(cut);
        else if (e.role == Role::crystal2)
          s.optic_axis =
              OpticAxis::vertical_plane(c.axis_configuration == AxisOrientation::parallel ? cut : -cut);
        else
          s.optic_axis = comp_axis;
      }
      elements.push_back(s);
    }
    stack = OpticalStack(elements, c.axis_configuration, c.angle_position_scale_mm_per_deg);
  }
  SourceModel model{Wavelength::from_nm(c.pump_nm), Wavelength::from_nm(c.signal_nm), c.signal_bandwidth_nm,
                    *stack, media, c.global_offset_rad};
  model.validate();
  return model;
}

std::string canonical_text(const KeyValueDocument& doc) {
  const auto block = [](const std::vector<KeyValueEntry>& entries) {
    std::map<std::string, std::string> sorted;
    for (const auto& e : entries) sorted[e.key] = e.value;
    std::string out;
    for (const auto& [k, v] : sorted) out += k + "=" + v + "\n";
    return out;
  };
  std::string text = block(doc.entries);
  for (const auto& s : doc.sections) text += "[" + s.name + "]\n" + block(s.entries);
  return text;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace spdc
