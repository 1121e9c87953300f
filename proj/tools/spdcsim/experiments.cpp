#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "spdc/collection.hpp"
#include "spdc/errors.hpp"
#include "spdc/io.hpp"
#include "spdc/phase.hpp"
#include "spdc/state.hpp"
#include "spdc/units.hpp"

namespace spdc::cli {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"phase-map", "fidelity-aperture", "polarizer-scan", "iris-scan",
                                              "rate-curve", "tradeoff",          "phasematch",     "compensate"};
  return names;
}

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string join_numbers(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(format_number(v));
  return join(s, ",");
}

struct Context {
  const std::string& name;
  SourceConfig config;
  SourceModel model;
  RunOptions options;
  std::ostream& log;

  std::filesystem::path csv() const { return options.out_dir / (name + ".csv"); }
  std::filesystem::path meta() const { return options.out_dir / (name + ".meta"); }

  Sidecar base_sidecar() const {
    return {{"experiment", name},
            {"config_hash", config.hash},
            {"sellmeier_labels", join(model.media.source_labels(), ";")},
            {"crystal_material", config.crystal_material},
            {"compensator_material", config.compensator_material},
            {"pump_nm", format_number(model.pump.nm())},
            {"signal_nm", format_number(model.signal.nm())},
            {"idler_nm", format_number(model.idler().nm())},
            {"global_offset_rad", format_number(model.global_offset_rad)},
            {"seed", std::to_string(options.seed)}};
  }

  PhaseMap map() const { return PhaseEngine(model, config.depth_samples).phase_map(config.grid(), config.depth()); }
};

void add_grid(Sidecar& s, const SourceConfig& c) {
  s.emplace_back("grid_step_deg", format_number(c.grid_step_deg));
  s.emplace_back("grid_half_extent_deg", format_number(c.grid_half_extent_deg));
  s.emplace_back("depth_mode", c.depth_mode == DepthMode::averaged ? "averaged" : "single");
  s.emplace_back("depth_samples", std::to_string(c.depth_samples));
}

void add_collection(Sidecar& s, const SourceConfig& c) {
  s.emplace_back("angle_position_scale_mm_per_deg", format_number(c.angle_position_scale_mm_per_deg));
  s.emplace_back("emission_sigma_deg", format_number(c.emission_sigma_deg));
  s.emplace_back("r_max_pairs_per_s_per_mW", format_number(c.r_max));
  // Efficiency bookkeeping only; never enters the fidelity or rate columns.
  s.emplace_back("report_pair_to_singles_ratio", format_number(c.pair_to_singles_ratio));
  s.emplace_back("report_detector_efficiency", format_number(c.detector_efficiency));
  s.emplace_back("qber_definition", "diagonal-basis error rate 1 - F");
}

std::vector<double> fitting_diameters(const SourceConfig& c, const GridSpec& grid) {
  std::vector<double> out;
  for (double d : c.diameters())
    if (0.5 * d / c.angle_position_scale_mm_per_deg <= grid.extent_deg() + 1e-12) out.push_back(d);
  return out;
}

void phase_map_experiment(const Context& ctx) {
  const PhaseMap map = ctx.map();
  CsvWriter csv({"alpha_x_deg", "alpha_y_deg", "delta_phi_rad"});
  for (int iy = 0; iy < map.side(); ++iy)
    for (int ix = 0; ix < map.side(); ++ix) csv.add_row({map.angle_deg(ix), map.angle_deg(iy), map.at(ix, iy)});
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  add_grid(s, ctx.config);
  s.emplace_back("residual_bound_rad", format_number(map.metadata().residual_bound_rad));
  s.emplace_back("constant_phase_radius_deg_0.2rad", format_number(constant_phase_radius(map, 0.2)));
  write_sidecar(ctx.meta(), s);
  ctx.log << "phase map " << map.side() << "x" << map.side() << ", constant-phase radius (0.2 rad) "
          << format_number(constant_phase_radius(map, 0.2)) << " deg\n";
}

void fidelity_aperture_experiment(const Context& ctx) {
  const PhaseMap map = ctx.map();
  const EmissionProfile profile = ctx.config.emission_profile();
  CsvWriter csv({"diameter_mm", "half_angle_deg", "rate_pairs_per_s_per_mW", "fidelity"});
  for (double d : fitting_diameters(ctx.config, map.grid())) {
    ApertureSpec ap;
    ap.diameter_mm = d;
    ap.scale_mm_per_deg = ctx.config.angle_position_scale_mm_per_deg;
    csv.add_row({d, ap.half_angle_deg(), pair_rate(ap, profile), aperture_fidelity(map, ap, profile)});
  }
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  add_grid(s, ctx.config);
  add_collection(s, ctx.config);
  s.emplace_back("target", "phi_minus");
  write_sidecar(ctx.meta(), s);
  ctx.log << "wrote " << ctx.csv().string() << "\n";
}

void polarizer_scan_experiment(const Context& ctx) {
  const PhaseMap map = ctx.map();
  ApertureSpec ap;
  ap.diameter_mm = ctx.config.iris_diameter_mm;
  ap.scale_mm_per_deg = ctx.config.angle_position_scale_mm_per_deg;
  const double model_f = aperture_fidelity(map, ap, ctx.config.emission_profile());
  const TwoPhotonState state{0.5, 0.5, {0.5 - model_f, 0.0}};

  std::vector<double> angles;
  const int steps = static_cast<int>(std::lround(180.0 / ctx.config.polarizer_step_deg));
  for (int i = 0; i <= steps; ++i) angles.push_back(180.0 * i / steps);
  const PolarizerScan clean = polarizer_curve(state, angles);
  const double peak = *std::max_element(clean.probabilities.begin(), clean.probabilities.end());
  std::mt19937_64 rng(ctx.options.seed);
  std::normal_distribution<double> noise(0.0, ctx.config.polarizer_noise * peak);
  std::vector<double> measured;
  CsvWriter csv({"theta_pol_deg", "probability"});
  for (std::size_t i = 0; i < angles.size(); ++i) {
    measured.push_back(std::max(0.0, clean.probabilities[i] + noise(rng)));
    csv.add_row({angles[i], measured.back()});
  }
  csv.write(ctx.csv());
  const PolarizerFit fit = fit_polarizer_curve(angles, measured);
  Sidecar s = ctx.base_sidecar();
  add_grid(s, ctx.config);
  add_collection(s, ctx.config);
  s.emplace_back("iris_diameter_mm", format_number(ctx.config.iris_diameter_mm));
  s.emplace_back("noise_fraction_of_peak", format_number(ctx.config.polarizer_noise));
  s.emplace_back("model_fidelity", format_number(model_f));
  s.emplace_back("fit_visibility", format_number(fit.visibility));
  s.emplace_back("fit_sigma_visibility", format_number(fit.sigma_visibility));
  s.emplace_back("fit_mean_phase_rad", format_number(fit.mean_phase_rad));
  s.emplace_back("fit_fidelity", format_number(fit.fidelity));
  s.emplace_back("fit_sigma_fidelity", format_number(fit.sigma_fidelity));
  s.emplace_back("fit_residual_rms", format_number(fit.residual_rms));
  write_sidecar(ctx.meta(), s);
  ctx.log << "model F = " << format_number(model_f) << ", fitted F = " << format_number(fit.fidelity) << " +- "
          << format_number(fit.sigma_fidelity) << "\n";
}

void iris_scan_experiment(const Context& ctx) {
  const PhaseMap map = ctx.map();
  std::vector<double> positions;
  const int n = static_cast<int>(std::lround(ctx.config.iris_scan_max_mm / ctx.config.iris_scan_step_mm));
  for (int i = -n; i <= n; ++i) positions.push_back(i * ctx.config.iris_scan_step_mm);
  const auto scan = iris_translation_scan(map, positions, ctx.config.iris_diameter_mm,
                                          ctx.config.angle_position_scale_mm_per_deg, ctx.config.emission_profile(),
                                          ctx.config.iris_diameter_sigma_mm);
  CsvWriter csv({"position_mm", "fidelity", "fidelity_lo", "fidelity_hi"});
  for (const auto& p : scan) csv.add_row({p.position_mm, p.fidelity, p.fidelity_lo, p.fidelity_hi});
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  add_grid(s, ctx.config);
  add_collection(s, ctx.config);
  s.emplace_back("iris_diameter_mm", format_number(ctx.config.iris_diameter_mm));
  s.emplace_back("iris_diameter_sigma_mm", format_number(ctx.config.iris_diameter_sigma_mm));
  s.emplace_back("translation_axis", "vertical");
  write_sidecar(ctx.meta(), s);
  ctx.log << "iris scan with " << scan.size() << " positions\n";
}

void rate_curve_experiment(const Context& ctx) {
  const EmissionProfile profile = ctx.config.emission_profile();
  std::vector<std::pair<double, double>> data;
  CsvWriter csv({"diameter_mm", "half_angle_deg", "rate_pairs_per_s_per_mW", "rate_fit_erf", "rate_fit_gaussian_disc"});
  std::vector<std::array<double, 3>> rows;
  // the configured ladder, continued until the half-angle reaches 4σ
  std::vector<double> diameters = ctx.config.diameters();
  const double scale = ctx.config.angle_position_scale_mm_per_deg;
  const double step = diameters.size() > 1 ? diameters.back() - diameters[diameters.size() - 2] : 0.05 * scale;
  while (diameters.back() < 2.0 * 4.0 * profile.sigma_deg * scale - 1e-9) diameters.push_back(diameters.back() + step);
  for (double d : diameters) {
    ApertureSpec ap;
    ap.diameter_mm = d;
    ap.scale_mm_per_deg = scale;
    const double rate = pair_rate(ap, profile);
    rows.push_back({d, ap.half_angle_deg(), rate});
    data.emplace_back(ap.half_angle_deg(), rate);
  }
  const SaturationFit erf_fit = fit_saturation_curve(data, SaturationModel::erf);
  const SaturationFit disc_fit = fit_saturation_curve(data, SaturationModel::gaussian_disc);
  for (const auto& r : rows) csv.add_row({r[0], r[1], r[2], erf_fit.evaluate(r[1]), disc_fit.evaluate(r[1])});
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  add_collection(s, ctx.config);
  s.emplace_back("fully_open_rate", format_number(pair_rate(ApertureSpec::fully_open(1.0), profile)));
  for (const auto* f : {&erf_fit, &disc_fit}) {
    const std::string p = std::string("fit_") + (f->model == SaturationModel::erf ? "erf" : "gaussian_disc") + "_";
    s.emplace_back(p + "scale", format_number(f->scale));
    s.emplace_back(p + "width_deg", format_number(f->width_deg));
    s.emplace_back(p + "offset", format_number(f->offset));
    s.emplace_back(p + "residual_norm", format_number(f->residual_norm));
    s.emplace_back(p + "degenerate", f->degenerate ? "true" : "false");
  }
  write_sidecar(ctx.meta(), s);
  ctx.log << "fully open rate " << format_number(profile.r_max) << " pairs/s/mW\n";
}

void tradeoff_experiment(const Context& ctx) {
  const std::vector<double> lengths = ctx.options.lengths_mm.value_or(ctx.config.tradeoff_lengths_mm);
  TradeoffOptions opt;
  opt.profile = ctx.config.emission_profile();
  opt.reference_length_mm = ctx.config.reference_length_mm;
  opt.grid = ctx.config.grid();
  opt.depth = ctx.config.depth();
  opt.radial_fit_radius_deg = ctx.config.radial_fit_radius_deg;
  const auto rows = tradeoff_curve(ctx.model, lengths, fitting_diameters(ctx.config, opt.grid), opt);
  CsvWriter csv({"length_mm", "diameter_mm", "rate", "fidelity", "qber"});
  CsvWriter radial({"length_mm", "diameter_mm", "rate", "fidelity", "qber"});
  for (const auto& r : rows) {
    csv.add_row({r.length_mm, r.diameter_mm, r.rate, r.fidelity, r.qber});
    const double fc = *r.fidelity_compensated;
    radial.add_row({r.length_mm, r.diameter_mm, r.rate, fc,
                    fc >= 0.5 ? fidelity_to_qber(fc) : std::numeric_limits<double>::quiet_NaN()});
  }
  csv.write(ctx.csv());
  radial.write(ctx.options.out_dir / "tradeoff_radial.csv");
  Sidecar s = ctx.base_sidecar();
  add_grid(s, ctx.config);
  add_collection(s, ctx.config);
  s.emplace_back("lengths_mm", join_numbers(lengths));
  s.emplace_back("reference_length_mm", format_number(ctx.config.reference_length_mm));
  s.emplace_back("qber_threshold_fidelity", format_number(opt.qber_threshold_fidelity));
  s.emplace_back("radial_fit_radius_deg", format_number(ctx.config.radial_fit_radius_deg));
  s.emplace_back("radial_companion", "tradeoff_radial.csv");
  write_sidecar(ctx.meta(), s);
  ctx.log << "tradeoff rows: " << rows.size() << "\n";
}

void phasematch_experiment(const Context& ctx) {
  const auto& mat = ctx.model.nonlinear_material();
  const double theta = type1_phase_matching_angle(mat, ctx.model.pump, ctx.model.signal);
  const WalkoffSummary w = PhaseEngine(ctx.model, ctx.config.depth_samples).walkoff();
  CsvWriter csv({"pump_nm", "signal_nm", "idler_nm", "theta_pm_deg", "rho_pump_deg", "rho_signal_deg",
                 "rho_idler_deg", "mismatch_signal", "mismatch_idler"});
  csv.add_row({ctx.model.pump.nm(), ctx.model.signal.nm(), ctx.model.idler().nm(), rad_to_deg(theta),
               rad_to_deg(w.pump_rad), rad_to_deg(w.signal_rad), rad_to_deg(w.idler_rad), w.signal_mismatch,
               w.idler_mismatch});
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  s.emplace_back("cut_angle_deg", format_number(ctx.config.cut_angle_deg));
  write_sidecar(ctx.meta(), s);
  ctx.log << "phase-matching angle " << format_number(rad_to_deg(theta)) << " deg; walk-off mismatch "
          << format_number(100 * w.signal_mismatch) << "% (signal), " << format_number(100 * w.idler_mismatch)
          << "% (idler)\n";
}

void compensate_experiment(const Context& ctx) {
  const CompensatorOptimum opt = optimize_compensator_thickness(ctx.model, ctx.config.compensator_search_lo_mm,
                                                                ctx.config.compensator_search_hi_mm,
                                                                ctx.config.spectral_samples);
  const auto profile_at = [&](double t) {
    const SourceModel m = ctx.model.with_stack(ctx.model.stack.with_compensator_thickness(t));
    return PhaseEngine(m, ctx.config.depth_samples).spectral_phase_profile(ctx.config.spectral_samples);
  };
  const auto bare = profile_at(0.0);
  const auto best = profile_at(opt.thickness_mm);
  const auto configured = profile_at(ctx.config.compensator_mm);
  CsvWriter csv({"signal_nm", "delta_phi_uncompensated_rad", "delta_phi_configured_rad", "delta_phi_optimized_rad"});
  for (std::size_t i = 0; i < bare.size(); ++i)
    csv.add_row({bare[i].first, bare[i].second, configured[i].second, best[i].second});
  csv.write(ctx.csv());
  Sidecar s = ctx.base_sidecar();
  s.emplace_back("signal_bandwidth_nm", format_number(ctx.model.signal_bandwidth_nm));
  s.emplace_back("configured_thickness_mm", format_number(ctx.config.compensator_mm));
  s.emplace_back("optimal_thickness_mm", format_number(opt.thickness_mm));
  s.emplace_back("spread_uncompensated_rad", format_number(opt.spread_uncompensated_rad));
  s.emplace_back("spread_configured_rad", format_number(peak_to_peak(configured)));
  s.emplace_back("spread_optimized_rad", format_number(opt.spread_compensated_rad));
  s.emplace_back("degenerate", opt.degenerate ? "true" : "false");
  write_sidecar(ctx.meta(), s);
  ctx.log << "optimal compensator " << format_number(opt.thickness_mm) << " mm; spread "
          << format_number(opt.spread_uncompensated_rad) << " -> " << format_number(opt.spread_compensated_rad)
          << " rad\n";
}

}  // namespace

void run_experiment(const std::string& name, const SourceConfig& config, const RunOptions& options,
                    std::ostream& log) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw InputError("unknown experiment '" + name + "'; valid names: " + join(names, ", "));
  SourceConfig c = config;
  if (options.grid_step_deg) {
    c.grid_step_deg = *options.grid_step_deg;
    c.grid().validate();
  }
  const Context ctx{name, c, build_source_model(c), options, log};
  if (name == "phase-map") phase_map_experiment(ctx);
  else if (name == "fidelity-aperture") fidelity_aperture_experiment(ctx);
  else if (name == "polarizer-scan") polarizer_scan_experiment(ctx);
  else if (name == "iris-scan") iris_scan_experiment(ctx);
  else if (name == "rate-curve") rate_curve_experiment(ctx);
  else if (name == "tradeoff") tradeoff_experiment(ctx);
  else if (name == "phasematch") phasematch_experiment(ctx);
  else compensate_experiment(ctx);
}

}  // namespace spdc::cli
