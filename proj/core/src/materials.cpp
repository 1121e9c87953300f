#include "spdc/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/kv.hpp"

#ifndef SPDC_DATA_DIR
#define SPDC_DATA_DIR "data"
#endif
#ifndef SPDC_INSTALL_DATA_DIR
#define SPDC_INSTALL_DATA_DIR SPDC_DATA_DIR
#endif

namespace spdc {

namespace {

std::string format_range(const SellmeierModel& m) {
  std::ostringstream os;
  os << "[" << m.range_um_min() << ", " << m.range_um_max() << "] um";
  return os.str();
}

const char* ray_name(Ray r) { return r == Ray::ordinary ? "ordinary" : "extraordinary"; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "configuration invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

SellmeierModel::SellmeierModel(std::string material, Ray ray, SellmeierForm form,
                               std::vector<double> coefficients, double range_um_min,
                               double range_um_max, std::string source_label)
    : material_(std::move(material)),
      ray_(ray),
      form_(form),
      coefficients_(std::move(coefficients)),
      range_min_(range_um_min),
      range_max_(range_um_max),
      source_label_(std::move(source_label)) {
  if (!(range_min_ > 0.0 && range_max_ > range_min_))
    throw InputError("Sellmeier set '" + source_label_ + "' has an empty or negative range");
  if (form_ == SellmeierForm::abcd && coefficients_.size() != 4)
    throw InputError("abcd Sellmeier form needs exactly 4 coefficients (b1..b4)");
  if (form_ == SellmeierForm::sellmeier && (coefficients_.empty() || coefficients_.size() % 2 != 0))
    throw InputError("sellmeier form needs an even, non-zero number of coefficients");

  // Poles inside the range would break continuity.
  const double lo2 = range_min_ * range_min_;
  const double hi2 = range_max_ * range_max_;
  auto pole_inside = [&](double c) { return c >= lo2 && c <= hi2; };
  if (form_ == SellmeierForm::abcd && pole_inside(coefficients_[2]))
    throw InputError("Sellmeier set '" + source_label_ + "' has a pole inside its valid range");
  if (form_ == SellmeierForm::sellmeier)
    for (std::size_t k = 1; k < coefficients_.size(); k += 2)
      if (pole_inside(coefficients_[k]))
        throw InputError("Sellmeier set '" + source_label_ + "' has a pole inside its valid range");

  constexpr int kProbes = 64;
  for (int i = 0; i <= kProbes; ++i) {
    const double l = range_min_ + (range_max_ - range_min_) * i / kProbes;
    const double n = index_unchecked(l);
    if (!(n > 1.0))
      throw InputError("Sellmeier set '" + source_label_ + "' yields index <= 1 inside its range");
  }
}

bool SellmeierModel::in_range(Wavelength lambda) const {
  return lambda.um() >= range_min_ && lambda.um() <= range_max_;
}

double SellmeierModel::index(Wavelength lambda) const {
  if (!in_range(lambda)) {
    std::ostringstream os;
    os << material_ << " (" << ray_name(ray_) << ", " << source_label_ << "): wavelength "
       << lambda.um() << " um outside valid range " << format_range(*this);
    throw DomainError(os.str());
  }
  return index_unchecked(lambda.um());
}

double SellmeierModel::index_unchecked(double l) const {
  const double l2 = l * l;
  const auto& b = coefficients_;
  double n2 = 0.0;
  switch (form_) {
    case SellmeierForm::abcd:
      n2 = b[0] + b[1] / (l2 - b[2]) - b[3] * l2;
      break;
    case SellmeierForm::sellmeier:
      n2 = 1.0;
      for (std::size_t k = 0; k + 1 < b.size(); k += 2) n2 += b[k] * l2 / (l2 - b[k + 1]);
      break;
  }
  return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

SellmeierModel parse_sellmeier(std::string_view text, std::string_view origin) {
  const KeyValueDocument doc = parse_key_values(text, origin);
  std::vector<std::string> problems;

  auto require = [&](const char* key) -> const KeyValueEntry* {
    const auto* e = doc.find(key);
    if (!e) problems.push_back(std::string(origin) + ": missing key '" + key + "'");
    return e;
  };
  auto number = [&](const KeyValueEntry* e) -> double {
    if (!e) return 0.0;
    try {
      return parse_double(e->value);
    } catch (const InputError&) {
      problems.push_back(std::string(origin) + ":" + std::to_string(e->line) + ": '" + e->key +
                         "' is not a number");
      return 0.0;
    }
  };

  const auto* material = require("material");
  const auto* form = require("form");
  const auto* lo = require("range_um_min");
  const auto* hi = require("range_um_max");
  const auto* label = require("source_label");
  const auto* ray = doc.find("ray");

  SellmeierForm f = SellmeierForm::abcd;
  if (form) {
    if (form->value == "abcd")
      f = SellmeierForm::abcd;
    else if (form->value == "sellmeier")
      f = SellmeierForm::sellmeier;
    else
      problems.push_back(std::string(origin) + ":" + std::to_string(form->line) + ": unknown form '" +
                         form->value + "' (expected abcd or sellmeier)");
  }
  Ray r = Ray::ordinary;
  if (ray) {
    if (ray->value == "extraordinary")
      r = Ray::extraordinary;
    else if (ray->value != "ordinary")
      problems.push_back(std::string(origin) + ":" + std::to_string(ray->line) + ": unknown ray '" +
                         ray->value + "'");
  }

  std::vector<double> coefficients;
  for (int k = 1;; ++k) {
    const auto* e = doc.find("b" + std::to_string(k));
    if (!e) break;
    coefficients.push_back(number(e));
  }
  if (coefficients.empty()) problems.push_back(std::string(origin) + ": no coefficients b1..bn");

  const double range_lo = number(lo);
  const double range_hi = number(hi);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return SellmeierModel(material->value, r, f, std::move(coefficients), range_lo, range_hi, label->value);
}

SellmeierModel load_sellmeier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open Sellmeier file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sellmeier(ss.str(), path.string());
}

std::string UniaxialMaterial::source_label() const {
  if (ordinary.source_label() == extraordinary.source_label()) return ordinary.source_label();
  return ordinary.source_label() + "; " + extraordinary.source_label();
}

UniaxialMaterial load_uniaxial_material(const std::filesystem::path& dir, std::string_view set) {
  const std::string base(set);
  auto o = load_sellmeier(dir / (base + ".o.txt"));
  auto e = load_sellmeier(dir / (base + ".e.txt"));
  if (o.ray() != Ray::ordinary || e.ray() != Ray::extraordinary)
    throw InputError("coefficient set '" + base + "': ray keys do not match file names");
  return UniaxialMaterial{std::move(o), std::move(e)};
}

std::filesystem::path default_sellmeier_dir() {
  if (const char* env = std::getenv("SPDC_SELLMEIER_DIR")) return env;
  const auto build_tree = std::filesystem::path(SPDC_DATA_DIR) / "sellmeier";
  std::error_code ec;
  if (std::filesystem::is_directory(build_tree, ec)) return build_tree;
  return std::filesystem::path(SPDC_INSTALL_DATA_DIR) / "sellmeier";
}

bool is_negative_uniaxial(const UniaxialMaterial& material, int probes) {
  const double lo = std::max(material.ordinary.range_um_min(), material.extraordinary.range_um_min());
  const double hi = std::min(material.ordinary.range_um_max(), material.extraordinary.range_um_max());
  for (int i = 0; i <= probes; ++i) {
    const auto l = Wavelength::from_um(lo + (hi - lo) * i / probes);
    if (!(material.extraordinary.index(l) < material.ordinary.index(l))) return false;
  }
  return true;
}

void UniaxialCrystal::validate() const {
  if (!(cut_angle_rad >= 0.0 && cut_angle_rad <= kPi / 2))
    throw InputError("cut angle must lie in [0, pi/2]");
  if (!(thickness_mm > 0.0)) throw InputError("crystal thickness must be positive");
}

double index_ordinary(const UniaxialCrystal& crystal, Wavelength lambda) {
  return crystal.material.ordinary.index(lambda);
}

double index_extraordinary_effective(const UniaxialMaterial& material, Wavelength lambda, double theta_prop) {
  const double no = material.ordinary.index(lambda);
  const double ne = material.extraordinary.index(lambda);
  const double c = std::cos(theta_prop);
  const double s = std::sin(theta_prop);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

double index_extraordinary_effective(const UniaxialCrystal& crystal, Wavelength lambda, double theta_prop) {
  return index_extraordinary_effective(crystal.material, lambda, theta_prop);
}

double walkoff_angle(const UniaxialMaterial& material, Wavelength lambda, double theta_prop) {
  const double no = material.ordinary.index(lambda);
  const double ne = material.extraordinary.index(lambda);
  const double n = index_extraordinary_effective(material, lambda, theta_prop);
  return std::atan(0.5 * n * n * (1.0 / (ne * ne) - 1.0 / (no * no)) * std::sin(2.0 * theta_prop));
}

double walkoff_angle(const UniaxialCrystal& crystal, Wavelength lambda, double theta_prop) {
  return walkoff_angle(crystal.material, lambda, theta_prop);
}

double walkoff_mismatch(double pump_rho, double spdc_rho) {
  if (pump_rho == 0.0) throw InputError("walk-off mismatch undefined for zero pump walk-off");
  return std::abs(pump_rho - spdc_rho) / std::abs(pump_rho);
}

double type1_phase_matching_angle(const UniaxialMaterial& material, Wavelength pump, Wavelength signal) {
  const Wavelength idler = conjugate_wavelength(pump, signal);
  // Required pump index from k_p = k_s + k_i.
  const double n_req = pump.um() * (material.ordinary.index(signal) / signal.um() +
                                    material.ordinary.index(idler) / idler.um());
  const double no = material.ordinary.index(pump);
  const double ne = material.extraordinary.index(pump);
  const double s2 = (1.0 / (n_req * n_req) - 1.0 / (no * no)) / (1.0 / (ne * ne) - 1.0 / (no * no));
  if (!(s2 >= 0.0 && s2 <= 1.0))
    throw DomainError("no type-I collinear phase matching for " + material.name() + " at these wavelengths");
  return std::asin(std::sqrt(s2));
}

}  // namespace spdc
