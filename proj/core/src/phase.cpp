#include "spdc/phase.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "spdc/detail/parallel.hpp"
#include "spdc/errors.hpp"

namespace spdc {

// ---------------------------------------------------------------------------
// MediumCatalog / SourceModel

void MediumCatalog::add_isotropic(const std::string& id, double index) {
  if (!(index >= 1.0)) throw InputError("isotropic medium '" + id + "' needs index >= 1");
  media_[id] = index;
}

void MediumCatalog::add_uniaxial(const std::string& id, UniaxialMaterial material) {
  media_.insert_or_assign(id, std::move(material));
}

bool MediumCatalog::is_uniaxial(const std::string& id) const {
  const auto it = media_.find(id);
  return it != media_.end() && std::holds_alternative<UniaxialMaterial>(it->second);
}

const UniaxialMaterial& MediumCatalog::uniaxial(const std::string& id) const {
  const auto it = media_.find(id);
  if (it == media_.end() || !std::holds_alternative<UniaxialMaterial>(it->second))
    throw InputError("medium '" + id + "' is not a uniaxial material in the catalog");
  return std::get<UniaxialMaterial>(it->second);
}

double MediumCatalog::isotropic_index(const std::string& id) const {
  const auto it = media_.find(id);
  if (it == media_.end() || !std::holds_alternative<double>(it->second))
    throw InputError("medium '" + id + "' is not an isotropic medium in the catalog");
  return std::get<double>(it->second);
}

std::vector<std::string> MediumCatalog::source_labels() const {
  std::set<std::string> labels;
  for (const auto& [id, m] : media_)
    if (const auto* u = std::get_if<UniaxialMaterial>(&m)) labels.insert(u->source_label());
  return {labels.begin(), labels.end()};
}

const UniaxialMaterial& SourceModel::nonlinear_material() const {
  return media.uniaxial(stack.element(Role::crystal1).medium);
}

SourceModel SourceModel::with_stack(OpticalStack s) const {
  SourceModel m = *this;
  m.stack = std::move(s);
  return m;
}

void SourceModel::validate() const {
  for (const auto& e : stack.elements()) {
    if (!media.contains(e.medium)) throw InputError("stack medium '" + e.medium + "' missing from the catalog");
    if (media.is_uniaxial(e.medium) && !e.optic_axis)
      throw InputError(std::string("uniaxial element '") + to_string(e.role) + "' needs an optic axis");
  }
  for (Role r : {Role::crystal1, Role::crystal2})
    if (!media.is_uniaxial(stack.element(r).medium))
      throw InputError(std::string(to_string(r)) + " must be a uniaxial crystal");
  if (!(pump.um() > 0.0 && signal.um() > pump.um()))
    throw InputError("signal wavelength must exceed the pump wavelength");
}

// ---------------------------------------------------------------------------
// Per-wavelength optics and ray tracing

namespace {

struct ElementOptics {
  bool uniaxial = false;
  double n_iso = 1.0;
  double no = 1.0;
  double ne = 1.0;
  Vec3 axis;
  double thickness = 0.0;
  Role role = Role::gap;
  bool collimated = false;

  bool extraordinary(Polarization pol) const {
    if (!uniaxial) return false;
    return pol == Polarization::H ? std::abs(axis.x) > std::abs(axis.y) : std::abs(axis.y) > std::abs(axis.x);
  }

  double index(Polarization pol, const Vec3& u) const {
    if (!uniaxial) return n_iso;
    if (!extraordinary(pol)) return no;
    const double c = dot(u, axis);
    return 1.0 / std::sqrt(c * c / (no * no) + (1.0 - c * c) / (ne * ne));
  }
};

struct WavelengthOptics {
  double k = 0.0;  // rad/mm in vacuum
  std::vector<ElementOptics> elements;
};

WavelengthOptics build_optics(const SourceModel& model, Wavelength lambda, std::size_t count) {
  WavelengthOptics w{lambda.wavenumber_per_mm(), {}};
  const auto& elems = model.stack.elements();
  const std::size_t comp = model.stack.index_of(Role::compensator);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& e = elems[i];
    ElementOptics o;
    o.thickness = e.thickness_mm;
    o.role = e.role;
    o.collimated = i >= comp;
    if (model.media.is_uniaxial(e.medium)) {
      const auto& m = model.media.uniaxial(e.medium);
      o.uniaxial = true;
      o.no = m.ordinary.index(lambda);
      o.ne = m.extraordinary.index(lambda);
      o.axis = e.optic_axis->unit();
    } else {
      o.n_iso = model.media.isotropic_index(e.medium);
    }
    w.elements.push_back(o);
  }
  return w;
}

double element_phase(const ElementOptics& o, double k, Polarization pol, double sx, double sy) {
  if (o.thickness == 0.0) return 0.0;
  if (o.collimated) return k * o.index(pol, Vec3{0.0, 0.0, 1.0}) * o.thickness;
  double n = 0.0;
  const Vec3 u = refract_into(sx, sy, [&](const Vec3& dir) { return o.index(pol, dir); }, &n);
  return k * n * o.thickness / u.z;
}

struct PhotonSegments {
  double birth_rate = 0.0;  // rad per mm of birth-crystal path still ahead
  double downstream = 0.0;  // rad from the birth crystal's exit face onward
};

PhotonSegments trace_photon(const WavelengthOptics& w, std::size_t birth, double sx, double sy) {
  PhotonSegments seg;
  Polarization pol = Polarization::H;
  {
    const auto& o = w.elements[birth];
    double n = 0.0;
    const Vec3 u = refract_into(sx, sy, [&](const Vec3& dir) { return o.index(pol, dir); }, &n);
    seg.birth_rate = w.k * n / u.z;
  }
  for (std::size_t i = birth + 1; i < w.elements.size(); ++i) {
    const auto& o = w.elements[i];
    seg.downstream += element_phase(o, w.k, pol, sx, sy);
    if (o.role == Role::hwp) pol = Polarization::V;
  }
  return seg;
}

struct Tables {
  WavelengthOptics pump;
  WavelengthOptics signal;
  WavelengthOptics idler;
  double idler_ratio = 1.0;  // λi / λs
  std::size_t crystal1 = 0;
  std::size_t crystal2 = 0;
  double l1 = 0.0;
  double l2 = 0.0;
};

Tables make_tables(const SourceModel& model, Wavelength signal, Wavelength idler) {
  const auto& stack = model.stack;
  Tables t;
  t.crystal1 = stack.index_of(Role::crystal1);
  t.crystal2 = stack.index_of(Role::crystal2);
  t.pump = build_optics(model, model.pump, t.crystal2 + 1);
  t.signal = build_optics(model, signal, stack.elements().size());
  t.idler = build_optics(model, idler, stack.elements().size());
  t.idler_ratio = idler.um() / signal.um();
  t.l1 = stack.crystal_length(1);
  t.l2 = stack.crystal_length(2);
  return t;
}

struct AngleTrace {
  double pump_rate1 = 0.0;
  double pump_between = 0.0;
  double pump_rate2 = 0.0;
  PhotonSegments vv[2];  // signal, idler
  PhotonSegments hh[2];
  double l1 = 0.0;
  double l2 = 0.0;

  PathwayPhase vv_phase(double z) const {
    return {Pathway::VV, pump_rate1 * z, vv[0].birth_rate * (l1 - z) + vv[0].downstream,
            vv[1].birth_rate * (l1 - z) + vv[1].downstream};
  }
  PathwayPhase hh_phase(double z) const {
    return {Pathway::HH, pump_rate1 * l1 + pump_between + pump_rate2 * z,
            hh[0].birth_rate * (l2 - z) + hh[0].downstream, hh[1].birth_rate * (l2 - z) + hh[1].downstream};
  }
  double raw(double vv_depth, double hh_depth) const {
    return vv_phase(vv_depth).total() - hh_phase(hh_depth).total();
  }
  double slope_vv() const { return pump_rate1 - vv[0].birth_rate - vv[1].birth_rate; }
  double slope_hh() const { return pump_rate2 - hh[0].birth_rate - hh[1].birth_rate; }
};

AngleTrace trace_angle(const Tables& t, const EmissionAngle& angle) {
  const Vec3 d = angle.direction();
  const double r = t.idler_ratio;
  if (r * std::hypot(d.x, d.y) >= 1.0) throw DomainError("idler direction beyond grazing");
  AngleTrace tr;
  tr.l1 = t.l1;
  tr.l2 = t.l2;
  const Vec3 z{0.0, 0.0, 1.0};
  tr.pump_rate1 = t.pump.k * t.pump.elements[t.crystal1].index(Polarization::V, z);
  tr.pump_rate2 = t.pump.k * t.pump.elements[t.crystal2].index(Polarization::V, z);
  for (std::size_t i = t.crystal1 + 1; i < t.crystal2; ++i)
    tr.pump_between += element_phase(t.pump.elements[i], t.pump.k, Polarization::V, 0.0, 0.0);
  tr.vv[0] = trace_photon(t.signal, t.crystal1, d.x, d.y);
  tr.vv[1] = trace_photon(t.idler, t.crystal1, -r * d.x, -r * d.y);
  tr.hh[0] = trace_photon(t.signal, t.crystal2, d.x, d.y);
  tr.hh[1] = trace_photon(t.idler, t.crystal2, -r * d.x, -r * d.y);
  return tr;
}

double mean_raw(const AngleTrace& tr, const std::vector<std::pair<double, double>>& pairs) {
  double sum = 0.0;
  for (const auto& [z1, z2] : pairs) sum += tr.raw(z1, z2);
  return sum / static_cast<double>(pairs.size());
}

std::pair<double, double> raw_range(const AngleTrace& tr, const std::vector<std::pair<double, double>>& pairs) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [z1, z2] : pairs) {
    const double v = tr.raw(z1, z2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------------------
// PhaseEngine

PhaseEngine::PhaseEngine(SourceModel model, int depth_samples)
    : model_(std::move(model)), depth_samples_(depth_samples) {
  model_.validate();
  if (depth_samples_ < 1) throw InputError("depth sampling needs at least one sample");
  pump_rho_ = walkoff_angle(model_.nonlinear_material(), model_.pump, model_.stack.cut_angle());
  const Tables t = make_tables(model_, model_.signal, model_.idler());
  reference_raw_ = mean_raw(trace_angle(t, EmissionAngle{}), averaged_pairs(model_.signal));
}

double PhaseEngine::spdc_rho(Wavelength signal) const {
  return walkoff_angle(model_.nonlinear_material(), signal, model_.stack.cut_angle());
}

std::pair<double, double> PhaseEngine::depth_pair(const GenerationPoint& point, Wavelength signal) const {
  const double partner = partner_depth(point, model_.stack, pump_rho_, spdc_rho(signal));
  return point.crystal == 1 ? std::pair{point.depth_mm, partner} : std::pair{partner, point.depth_mm};
}

namespace {

// Equal relative depth in both crystals, so the mean of raw Δφ over the pairs
// is the difference of the per-crystal mean phases.
std::vector<std::pair<double, double>> per_crystal_samples(const OpticalStack& stack, int samples) {
  const double l1 = stack.crystal_length(1);
  const double l2 = stack.crystal_length(2);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double f = (i + 0.5) / samples;
    pairs.emplace_back(f * l1, f * l2);
  }
  return pairs;
}

}  // namespace

std::vector<std::pair<double, double>> PhaseEngine::averaged_pairs(Wavelength) const {
  return per_crystal_samples(model_.stack, depth_samples_);
}

std::vector<std::pair<double, double>> PhaseEngine::spread_pairs(Wavelength signal) const {
  const double l1 = model_.stack.crystal_length(1);
  const double l2 = model_.stack.crystal_length(2);
  std::vector<double> depths;
  const int n = std::max(depth_samples_, 2);
  for (int i = 0; i < n; ++i) depths.push_back(l1 * i / (n - 1));
  const double tp = std::tan(pump_rho_);
  if (tp != 0.0) {
    // Unclamped partner depth is affine in z1; add the depths where it meets a face.
    const double rho = spdc_rho(signal);
    const auto off = [&](double z1) {
      return transverse_exit_position(GenerationPoint{1, z1, 0.0}, model_.stack, pump_rho_, rho);
    };
    const bool parallel = model_.stack.axis_configuration() == AxisOrientation::parallel;
    const auto unclamped = [&](double z1) { return parallel ? l2 - off(z1) / tp : l2 + off(z1) / tp; };
    const double a = unclamped(0.0);
    const double b = (unclamped(l1) - a) / l1;
    if (b != 0.0)
      for (double face : {0.0, l2}) {
        const double z1 = (face - a) / b;
        if (z1 > 0.0 && z1 < l1) depths.push_back(z1);
      }
  }
  std::vector<std::pair<double, double>> pairs;
  for (double z1 : depths) pairs.push_back(depth_pair(GenerationPoint{1, z1, 0.0}, signal));
  return pairs;
}

PathwayPhase PhaseEngine::accumulated_phase(Pathway pathway, double depth_mm, const EmissionAngle& angle,
                                            Wavelength signal, Wavelength idler) const {
  const double lhs = 1.0 / model_.pump.um();
  const double rhs = 1.0 / signal.um() + 1.0 / idler.um();
  if (std::abs(rhs - lhs) > 1e-3 * lhs) {
    std::ostringstream os;
    os << "energy conservation violated: 1/" << model_.pump.nm() << " nm vs 1/" << signal.nm() << " + 1/"
       << idler.nm() << " nm";
    throw InputError(os.str());
  }
  angle.validate();
  GenerationPoint{pathway == Pathway::VV ? 1 : 2, depth_mm, 0.0}.validate(model_.stack);
  const AngleTrace tr = trace_angle(make_tables(model_, signal, idler), angle);
  return pathway == Pathway::VV ? tr.vv_phase(depth_mm) : tr.hh_phase(depth_mm);
}

double PhaseEngine::raw_delta_phi(double vv_depth, double hh_depth, const EmissionAngle& angle,
                                  Wavelength signal) const {
  angle.validate();
  GenerationPoint{1, vv_depth, 0.0}.validate(model_.stack);
  GenerationPoint{2, hh_depth, 0.0}.validate(model_.stack);
  const AngleTrace tr = trace_angle(make_tables(model_, signal, conjugate_wavelength(model_.pump, signal)), angle);
  return tr.raw(vv_depth, hh_depth);
}

double PhaseEngine::delta_phi_between(double vv_depth, double hh_depth, const EmissionAngle& angle,
                                      Wavelength signal) const {
  return raw_delta_phi(vv_depth, hh_depth, angle, signal) - reference_raw_ + model_.global_offset_rad;
}

double PhaseEngine::delta_phi(const GenerationPoint& point, const EmissionAngle& angle, Wavelength signal) const {
  point.validate(model_.stack);
  const auto [z1, z2] = depth_pair(point, signal);
  return delta_phi_between(z1, z2, angle, signal);
}

double PhaseEngine::depth_averaged_delta_phi(const EmissionAngle& angle, Wavelength signal) const {
  angle.validate();
  const AngleTrace tr = trace_angle(make_tables(model_, signal, conjugate_wavelength(model_.pump, signal)), angle);
  return mean_raw(tr, averaged_pairs(signal)) - reference_raw_ + model_.global_offset_rad;
}

double PhaseEngine::depth_spread(const EmissionAngle& angle, Wavelength signal) const {
  angle.validate();
  const AngleTrace tr = trace_angle(make_tables(model_, signal, conjugate_wavelength(model_.pump, signal)), angle);
  const auto [lo, hi] = raw_range(tr, spread_pairs(signal));
  return hi - lo;
}

double PhaseEngine::depth_phase_slope(Pathway pathway, const EmissionAngle& angle, Wavelength signal) const {
  angle.validate();
  const AngleTrace tr = trace_angle(make_tables(model_, signal, conjugate_wavelength(model_.pump, signal)), angle);
  return pathway == Pathway::VV ? tr.slope_vv() : tr.slope_hh();
}

namespace {

double partner_residual_range(const std::vector<std::pair<double, double>>& pairs, double l1, double l2) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [z1, z2] : pairs) {
    const double d = z1 * l2 / l1 - z2;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

}  // namespace

double PhaseEngine::position_residual_bound(const EmissionAngle& angle, Wavelength signal) const {
  angle.validate();
  const AngleTrace tr = trace_angle(make_tables(model_, signal, conjugate_wavelength(model_.pump, signal)), angle);
  const double l1 = model_.stack.crystal_length(1);
  const double l2 = model_.stack.crystal_length(2);
  // Δφ(z1) = c + (sV − sH·L2/L1)·z1 + sH·(z1·L2/L1 − z2); bound each part.
  const double range = partner_residual_range(spread_pairs(signal), l1, l2);
  return std::abs(tr.slope_hh()) * range + std::abs(tr.slope_vv() - tr.slope_hh() * l2 / l1) * l1;
}

WalkoffSummary PhaseEngine::walkoff() const {
  const auto& mat = model_.nonlinear_material();
  const double cut = model_.stack.cut_angle();
  WalkoffSummary w;
  w.pump_rad = pump_rho_;
  w.signal_rad = walkoff_angle(mat, model_.signal, cut);
  w.idler_rad = walkoff_angle(mat, model_.idler(), cut);
  w.signal_mismatch = walkoff_mismatch(w.pump_rad, w.signal_rad);
  w.idler_mismatch = walkoff_mismatch(w.pump_rad, w.idler_rad);
  return w;
}

PhaseMap PhaseEngine::phase_map(const GridSpec& grid, const DepthSpec& depth) const {
  grid.validate();
  const Wavelength signal = model_.signal;
  const Tables tables = make_tables(model_, signal, model_.idler());
  std::vector<std::pair<double, double>> pairs;
  if (depth.mode == DepthMode::averaged) {
    if (depth.samples < 1) throw InputError("depth sampling needs at least one sample");
    pairs = per_crystal_samples(model_.stack, depth.samples);
  } else {
    const GenerationPoint p{1, depth.depth_mm, 0.0};
    p.validate(model_.stack);
    pairs.push_back(depth_pair(p, signal));
  }
  const double l1 = model_.stack.crystal_length(1);
  const double l2 = model_.stack.crystal_length(2);
  const double range = partner_residual_range(spread_pairs(signal), l1, l2);

  const int side = grid.side();
  const int half = grid.half_count();
  std::vector<double> values(static_cast<std::size_t>(side) * side);
  std::vector<double> bounds(static_cast<std::size_t>(side));
  detail::parallel_for(side, [&](int iy) {
    double row_bound = 0.0;
    for (int ix = 0; ix < side; ++ix) {
      const auto angle = EmissionAngle::from_deg((ix - half) * grid.step_deg, (iy - half) * grid.step_deg);
      const AngleTrace tr = trace_angle(tables, angle);
      values[static_cast<std::size_t>(iy) * side + ix] = mean_raw(tr, pairs);
      row_bound = std::max(row_bound, std::abs(tr.slope_hh()) * range +
                                          std::abs(tr.slope_vv() - tr.slope_hh() * l2 / l1) * l1);
    }
    bounds[static_cast<std::size_t>(iy)] = row_bound;
  });
  const double centre = values[static_cast<std::size_t>(half) * side + half];
  for (double& v : values) v = v - centre + model_.global_offset_rad;

  PhaseMapMetadata meta;
  meta.sellmeier_labels = model_.media.source_labels();
  meta.pump_nm = model_.pump.nm();
  meta.signal_nm = signal.nm();
  meta.idler_nm = model_.idler().nm();
  meta.global_offset_rad = model_.global_offset_rad;
  meta.depth_mode = depth.mode == DepthMode::averaged ? "averaged" : "single";
  meta.residual_bound_rad = *std::max_element(bounds.begin(), bounds.end());
  PhaseMap map(grid, std::move(values), std::move(meta));
  check_continuity(map);
  return map;
}

std::vector<std::pair<double, double>> PhaseEngine::spectral_phase_profile(int samples) const {
  if (samples < 1) throw InputError("spectral profile needs at least one sample");
  const double centre = model_.signal.nm();
  const double bw = model_.signal_bandwidth_nm;
  std::vector<std::pair<double, double>> out;
  const int n = (bw > 0.0 && samples > 1) ? samples : 1;
  for (int i = 0; i < n; ++i) {
    const double nm = n == 1 ? centre : centre - bw / 2 + bw * i / (n - 1);
    out.emplace_back(nm, depth_averaged_delta_phi(EmissionAngle{}, Wavelength::from_nm(nm)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stack studies

double peak_to_peak(const std::vector<std::pair<double, double>>& profile) {
  if (profile.empty()) throw InputError("empty profile");
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  return hi->second - lo->second;
}

CompensatorOptimum optimize_compensator_thickness(const SourceModel& model, double lo_mm, double hi_mm,
                                                  int spectral_samples) {
  if (!(lo_mm >= 0.0 && hi_mm <= 10.0 && lo_mm < hi_mm))
    throw InputError("compensator search interval must lie within [0, 10] mm");
  const auto objective = [&](double t) {
    const SourceModel m = model.with_stack(model.stack.with_compensator_thickness(t));
    return peak_to_peak(PhaseEngine(m, 16).spectral_phase_profile(spectral_samples));
  };
  CompensatorOptimum out;
  out.spread_uncompensated_rad = objective(0.0);
  const double current = model.stack.element(Role::compensator).thickness_mm;
  const double f_lo = objective(lo_mm);
  const double f_mid = objective(0.5 * (lo_mm + hi_mm));
  const double f_hi = objective(hi_mm);
  if (std::max({f_lo, f_mid, f_hi}) - std::min({f_lo, f_mid, f_hi}) <= 1e-12) {
    out.thickness_mm = current;
    out.spread_compensated_rad = objective(current);
    out.degenerate = true;
    return out;
  }
  // ~1e-4 relative precision on a ≤10 mm interval resolves well below 1 µm.
  const auto [t, f] = boost::math::tools::brent_find_minima(objective, lo_mm, hi_mm, 24);
  constexpr double kTolerance = 1e-3;
  if (t - lo_mm < kTolerance || hi_mm - t < kTolerance) {
    std::ostringstream os;
    os << "compensator optimum at the search boundary (" << t << " mm in [" << lo_mm << ", " << hi_mm
       << "] mm); widen the interval or check the compensator axis";
    throw DiagnosticError(os.str());
  }
  out.thickness_mm = t;
  out.spread_compensated_rad = f;
  return out;
}

double crystal_length_scaling_check(const SourceModel& model, double l1_mm, double l2_mm, const GridSpec& grid,
                                    bool remove_spacers, double exclusion_deg, int depth_samples) {
  if (!(l1_mm > 0.0 && l2_mm > 0.0)) throw InputError("crystal lengths must be positive");
  OpticalStack stack = model.stack;
  if (remove_spacers) stack = stack.with_gap_thickness(0.0).with_hwp_thickness(0.0);
  DepthSpec depth;
  depth.samples = depth_samples;
  const auto map_for = [&](double l) {
    return PhaseEngine(model.with_stack(stack.with_crystal_lengths(l, l)), depth_samples).phase_map(grid, depth);
  };
  const PhaseMap a = map_for(l1_mm);
  const PhaseMap b = map_for(l2_mm);
  const double c = l2_mm / l1_mm;
  const double off = model.global_offset_rad;
  double worst = 0.0;
  for (int iy = 0; iy < a.side(); ++iy)
    for (int ix = 0; ix < a.side(); ++ix) {
      if (std::hypot(a.angle_deg(ix), a.angle_deg(iy)) <= exclusion_deg) continue;
      const double expected = c * (a.at(ix, iy) - off);
      if (std::abs(expected) < 1e-9) continue;
      worst = std::max(worst, std::abs((b.at(ix, iy) - off) - expected) / std::abs(expected));
    }
  return worst;
}

PhaseMap apply_radial_compensation(const PhaseMap& map, const std::vector<double>& coefficients) {
  std::vector<double> values = map.values();
  const int n = map.side();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double r = std::hypot(map.angle_deg(ix), map.angle_deg(iy));
      double add = 0.0;
      double rk = 1.0;
      for (double c : coefficients) {
        add += c * rk;
        rk *= r;
      }
      values[static_cast<std::size_t>(iy) * n + ix] += add;
    }
  PhaseMapMetadata meta = map.metadata();
  meta.radial_profile = coefficients;
  return PhaseMap(map.grid(), std::move(values), std::move(meta));
}

std::vector<double> fit_radial_compensation(const PhaseMap& map, double fit_radius_deg,
                                            const std::vector<int>& powers) {
  if (powers.empty()) throw InputError("radial fit needs at least one power");
  for (int p : powers)
    if (p < 0) throw InputError("radial fit powers must be non-negative");
  const int n = map.side();
  const double centre = map.center();
  std::vector<std::array<double, 2>> cells;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double r = std::hypot(map.angle_deg(ix), map.angle_deg(iy));
      if (r <= fit_radius_deg) cells.push_back({r, -(map.at(ix, iy) - centre)});
    }
  if (cells.size() < powers.size()) throw InputError("radial fit radius covers too few grid cells");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(powers.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < powers.size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(cells[i][0], powers[j]);
    y(static_cast<Eigen::Index>(i)) = cells[i][1];
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
  std::vector<double> coeffs(static_cast<std::size_t>(*std::max_element(powers.begin(), powers.end())) + 1, 0.0);
  for (std::size_t j = 0; j < powers.size(); ++j)
    coeffs[static_cast<std::size_t>(powers[j])] += x(static_cast<Eigen::Index>(j));
  return coeffs;
}

double constant_phase_radius(const PhaseMap& map, double tolerance_rad) {
  const int n = map.side();
  const double centre = map.center();
  double first_bad = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (std::abs(map.at(ix, iy) - centre) > tolerance_rad)
        first_bad = std::min(first_bad, std::hypot(map.angle_deg(ix), map.angle_deg(iy)));
  double radius = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double r = std::hypot(map.angle_deg(ix), map.angle_deg(iy));
      if (r < first_bad && r <= map.grid().extent_deg()) radius = std::max(radius, r);
    }
  return radius;
}

double depth_contrast(const SourceModel& model, AxisOrientation configuration, const EmissionAngle& angle) {
  const PhaseEngine engine(model.with_stack(model.stack.with_axis_configuration(configuration)));
  return engine.depth_spread(angle, model.signal);
}

double antiparallel_contrast(const SourceModel& model) {
  return depth_contrast(model, AxisOrientation::antiparallel);
}

}  // namespace spdc
