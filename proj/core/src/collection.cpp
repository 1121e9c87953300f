#include "spdc/collection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/NonLinearOptimization>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

ApertureSpec ApertureSpec::fully_open(double scale_mm_per_deg) {
  ApertureSpec a;
  a.diameter_mm = std::numeric_limits<double>::infinity();
  a.scale_mm_per_deg = scale_mm_per_deg;
  return a;
}

void ApertureSpec::validate() const {
  if (!(diameter_mm >= 0.0)) throw InputError("aperture diameter must be non-negative");
  if (!(scale_mm_per_deg > 0.0)) throw InputError("angle-position scale must be positive");
  if (!std::isfinite(center_x_mm) || !std::isfinite(center_y_mm)) throw InputError("aperture centre must be finite");
}

double EmissionProfile::density(double r_deg) const {
  if (uniform) return 1.0;
  const double s2 = sigma_deg * sigma_deg;
  return std::exp(-0.5 * r_deg * r_deg / s2) / (kTwoPi * s2);
}

EmissionProfile EmissionProfile::scaled_for_length(double reference_length_mm, double length_mm) const {
  if (!(reference_length_mm > 0.0 && length_mm > 0.0)) throw InputError("crystal lengths must be positive");
  EmissionProfile p = *this;
  p.r_max = r_max * length_mm / reference_length_mm;
  return p;
}

void EmissionProfile::validate() const {
  if (!uniform && !(sigma_deg > 0.0)) throw InputError("emission width sigma must be positive");
  if (!(r_max >= 0.0)) throw InputError("R_max must be non-negative");
}

double emission_sigma_for_fraction(double half_angle_deg, double fraction) {
  if (!(half_angle_deg > 0.0 && fraction > 0.0 && fraction < 1.0))
    throw InputError("sigma calibration needs a positive half-angle and a fraction in (0, 1)");
  return half_angle_deg / std::sqrt(-2.0 * std::log1p(-fraction));
}

namespace {

// ∫∫ over the disc of radius R around (cx, cy) of f(x, y), two components at
// once. Radial: composite Gauss-Legendre; azimuth: trapezoid refined until
// both components settle.
template <class F>
std::array<double, 2> disc_integral(double cx, double cy, double radius, F&& f) {
  using boost::math::quadrature::gauss;
  constexpr int kPanels = 8;
  const auto ring = [&](double r) {
    const auto sweep = [&](int m, int stride, std::array<double, 2>& acc) {
      for (int k = 0; k < m; k += stride) {
        const double t = kTwoPi * k / m;
        const auto v = f(cx + r * std::cos(t), cy + r * std::sin(t));
        acc[0] += v[0];
        acc[1] += v[1];
      }
    };
    int m = 32;
    std::array<double, 2> sum{0.0, 0.0};
    sweep(m, 1, sum);
    std::array<double, 2> prev{sum[0] / m, sum[1] / m};
    while (m < 2048) {
      // Only the new odd nodes need evaluating.
      std::array<double, 2> odd{0.0, 0.0};
      const int m2 = 2 * m;
      for (int k = 1; k < m2; k += 2) {
        const double t = kTwoPi * k / m2;
        const auto v = f(cx + r * std::cos(t), cy + r * std::sin(t));
        odd[0] += v[0];
        odd[1] += v[1];
      }
      sum[0] += odd[0];
      sum[1] += odd[1];
      m = m2;
      const std::array<double, 2> cur{sum[0] / m, sum[1] / m};
      const bool settled = std::abs(cur[0] - prev[0]) <= 1e-10 * std::abs(cur[0]) + 1e-300 &&
                           std::abs(cur[1] - prev[1]) <= 1e-10 * std::abs(cur[1]) + 1e-300;
      prev = cur;
      if (settled) break;
    }
    return std::array<double, 2>{kTwoPi * r * prev[0], kTwoPi * r * prev[1]};
  };
  std::array<double, 2> total{0.0, 0.0};
  const double h = radius / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double a = p * h;
    const double b = a + h;
    const auto& x = gauss<double, 20>::abscissa();
    const auto& w = gauss<double, 20>::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t nodes = x[i] == 0.0 ? 1 : 2;
      for (std::size_t s = 0; s < nodes; ++s) {
        const double r = mid + (s == 0 ? x[i] : -x[i]) * half;
        const auto v = ring(r);
        total[0] += w[i] * half * v[0];
        total[1] += w[i] * half * v[1];
      }
    }
  }
  return total;
}

void check_footprint(const PhaseMap& map, const ApertureSpec& aperture) {
  const double reach =
      std::max(std::abs(aperture.center_x_deg()), std::abs(aperture.center_y_deg())) + aperture.half_angle_deg();
  if (!(reach <= map.grid().extent_deg() * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "aperture footprint reaches " << reach << " deg but the phase map covers only "
       << map.grid().extent_deg() << " deg; recompute the map with a half extent of at least " << reach << " deg";
    throw InputError(os.str());
  }
}

}  // namespace

double aperture_fidelity(const PhaseMap& map, const ApertureSpec& aperture, const EmissionProfile& profile,
                         BellTarget target) {
  aperture.validate();
  profile.validate();
  if (aperture.is_fully_open()) throw InputError("a fully open aperture exceeds every phase map");
  check_footprint(map, aperture);
  const double cx = aperture.center_x_deg();
  const double cy = aperture.center_y_deg();
  if (aperture.diameter_mm == 0.0) return pure_state_fidelity(map.sample(cx, cy), target);
  const auto sums = disc_integral(cx, cy, aperture.half_angle_deg(), [&](double x, double y) {
    const double w = profile.density(std::hypot(x, y));
    return std::array<double, 2>{w, w * pure_state_fidelity(map.sample(x, y), target)};
  });
  if (!(sums[0] > 0.0)) throw DiagnosticError("aperture collects no emission weight");
  return sums[1] / sums[0];
}

std::vector<IrisScanPoint> iris_translation_scan(const PhaseMap& map, const std::vector<double>& positions_mm,
                                                 double diameter_mm, double scale_mm_per_deg,
                                                 const EmissionProfile& profile,
                                                 std::optional<double> diameter_sigma_mm, BellTarget target) {
  if (diameter_sigma_mm && !(*diameter_sigma_mm >= 0.0 && *diameter_sigma_mm <= diameter_mm))
    throw InputError("diameter uncertainty must lie in [0, diameter]");
  std::vector<IrisScanPoint> out;
  out.reserve(positions_mm.size());
  for (double pos : positions_mm) {
    ApertureSpec ap;
    ap.diameter_mm = diameter_mm;
    ap.center_y_mm = pos;
    ap.scale_mm_per_deg = scale_mm_per_deg;
    IrisScanPoint p;
    p.position_mm = pos;
    p.fidelity = aperture_fidelity(map, ap, profile, target);
    p.fidelity_lo = p.fidelity;
    p.fidelity_hi = p.fidelity;
    if (diameter_sigma_mm && *diameter_sigma_mm > 0.0) {
      for (double d : {diameter_mm - *diameter_sigma_mm, diameter_mm + *diameter_sigma_mm}) {
        ap.diameter_mm = d;
        const double f = aperture_fidelity(map, ap, profile, target);
        p.fidelity_lo = std::min(p.fidelity_lo, f);
        p.fidelity_hi = std::max(p.fidelity_hi, f);
      }
    }
    out.push_back(p);
  }
  return out;
}

double pair_rate(const ApertureSpec& aperture, const EmissionProfile& profile) {
  aperture.validate();
  profile.validate();
  if (profile.uniform) throw InputError("pair rate needs a Gaussian emission profile");
  if (aperture.is_fully_open()) return profile.r_max;
  if (aperture.diameter_mm == 0.0) return 0.0;
  const auto sums =
      disc_integral(aperture.center_x_deg(), aperture.center_y_deg(), aperture.half_angle_deg(),
                    [&](double x, double y) { return std::array<double, 2>{profile.density(std::hypot(x, y)), 0.0}; });
  return profile.r_max * std::min(1.0, sums[0]);
}

const char* to_string(SaturationModel model) { return model == SaturationModel::erf ? "erf" : "gaussian-disc"; }

SaturationModel saturation_model_from_string(const std::string& text) {
  if (text == "erf") return SaturationModel::erf;
  if (text == "gaussian-disc") return SaturationModel::gaussian_disc;
  throw InputError("unknown saturation model '" + text + "' (expected erf or gaussian-disc)");
}

namespace {

double shape(SaturationModel model, double a, double w) {
  if (model == SaturationModel::gaussian_disc) return 1.0 - std::exp(-0.5 * a * a / (w * w));
  return std::erf(a / (std::sqrt(2.0) * w));
}

double shape_dw(SaturationModel model, double a, double w) {
  const double e = std::exp(-0.5 * a * a / (w * w));
  if (model == SaturationModel::gaussian_disc) return -e * a * a / (w * w * w);
  return -2.0 / std::sqrt(kPi) * e * a / (std::sqrt(2.0) * w * w);
}

struct SaturationFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<std::pair<double, double>>* data;
  SaturationModel model;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(data->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < data->size(); ++i) {
      const auto [a, y] = (*data)[i];
      f(static_cast<Eigen::Index>(i)) = x(0) * shape(model, a, x(1)) + x(2) - y;
    }
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < data->size(); ++i) {
      const double a = (*data)[i].first;
      const auto r = static_cast<Eigen::Index>(i);
      j(r, 0) = shape(model, a, x(1));
      j(r, 1) = x(0) * shape_dw(model, a, x(1));
      j(r, 2) = 1.0;
    }
    return 0;
  }
};

}  // namespace

double SaturationFit::evaluate(double angle_deg) const {
  if (degenerate) return offset;
  return scale * shape(model, angle_deg, width_deg) + offset;
}

SaturationFit fit_saturation_curve(const std::vector<std::pair<double, double>>& data, SaturationModel model) {
  if (data.size() < 5) throw InputError("saturation fit needs at least 5 points");
  for (const auto& [a, y] : data)
    if (!std::isfinite(a) || !std::isfinite(y)) throw InputError("saturation fit data must be finite");
  SaturationFit fit;
  fit.model = model;

  std::vector<std::pair<double, double>> sorted = data;
  std::sort(sorted.begin(), sorted.end());
  const auto [lo, hi] = std::minmax_element(sorted.begin(), sorted.end(),
                                            [](const auto& p, const auto& q) { return p.second < q.second; });
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0, [](double s, const auto& p) { return s + p.second; }) /
      static_cast<double>(sorted.size());
  if (hi->second - lo->second <= 1e-12 * std::max(1.0, std::abs(mean))) {
    fit.offset = mean;
    fit.degenerate = true;
    return fit;
  }

  const double o0 = sorted.front().second;
  const double s0 = hi->second - o0;
  double a_half = sorted.back().first;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].second - o0 >= 0.5 * s0) {
      const auto [a0, y0] = sorted[i - 1];
      const auto [a1, y1] = sorted[i];
      a_half = y1 == y0 ? a1 : a0 + (o0 + 0.5 * s0 - y0) * (a1 - a0) / (y1 - y0);
      break;
    }
  const double half_point = model == SaturationModel::gaussian_disc ? std::sqrt(2.0 * std::log(2.0)) : 0.6744897501960817;
  Eigen::VectorXd x(3);
  x << s0, std::max(a_half, 1e-6) / half_point, o0;

  SaturationFunctor functor{&sorted, model};
  Eigen::LevenbergMarquardt<SaturationFunctor> lm(functor);
  lm.parameters.maxfev = 2000;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(x);
  Eigen::VectorXd r(static_cast<Eigen::Index>(sorted.size()));
  functor(x, r);
  using namespace Eigen::LevenbergMarquardtSpace;
  if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || status == UserAsked ||
      !x.allFinite()) {
    std::ostringstream os;
    os << "saturation fit (" << to_string(model) << ") did not converge, status " << static_cast<int>(status)
       << "; residual norm " << r.norm();
    throw DiagnosticError(os.str());
  }
  if (std::abs(x(1)) > sorted.back().first) {
    std::ostringstream os;
    os << "saturation fit (" << to_string(model) << "): fitted width " << std::abs(x(1))
       << " deg exceeds the largest sampled angle " << sorted.back().first
       << " deg; the data do not span the knee";
    throw DiagnosticError(os.str());
  }
  fit.scale = x(0);
  fit.width_deg = std::abs(x(1));
  fit.offset = x(2);
  fit.residual_norm = r.norm();
  fit.residual_rms = r.norm() / std::sqrt(static_cast<double>(r.size()));
  fit.iterations = static_cast<int>(lm.iter);
  return fit;
}

std::vector<TradeoffRow> tradeoff_curve(const SourceModel& model, const std::vector<double>& lengths_mm,
                                        const std::vector<double>& diameters_mm, const TradeoffOptions& options) {
  if (lengths_mm.empty() || diameters_mm.empty()) throw InputError("tradeoff needs lengths and diameters");
  const double scale = model.stack.angle_position_scale();
  std::vector<TradeoffRow> rows;
  for (double length : lengths_mm) {
    const SourceModel m = model.with_stack(model.stack.with_crystal_lengths(length, length));
    const PhaseMap map = PhaseEngine(m, options.depth.samples).phase_map(options.grid, options.depth);
    std::optional<PhaseMap> compensated;
    if (options.radial_fit_radius_deg)
      compensated = apply_radial_compensation(map, fit_radial_compensation(map, *options.radial_fit_radius_deg));
    const EmissionProfile profile = options.profile.scaled_for_length(options.reference_length_mm, length);
    for (double d : diameters_mm) {
      ApertureSpec ap;
      ap.diameter_mm = d;
      ap.scale_mm_per_deg = scale;
      TradeoffRow row;
      row.length_mm = length;
      row.diameter_mm = d;
      row.half_angle_deg = ap.half_angle_deg();
      row.rate = pair_rate(ap, profile);
      row.fidelity = aperture_fidelity(map, ap, profile, options.target);
      row.qber = row.fidelity >= 0.5 ? fidelity_to_qber(row.fidelity) : std::numeric_limits<double>::quiet_NaN();
      row.within_qber_threshold = row.fidelity >= options.qber_threshold_fidelity;
      if (compensated) row.fidelity_compensated = aperture_fidelity(*compensated, ap, profile, options.target);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace spdc
