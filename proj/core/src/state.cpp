#include "spdc/state.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

void TwoPhotonState::validate() const {
  if (!(p_hh >= 0.0 && p_vv >= 0.0)) throw InputError("state populations must be non-negative");
  if (std::abs(p_hh + p_vv - 1.0) > 1e-9) throw InputError("state populations must sum to 1");
  if (std::abs(coherence) > std::sqrt(p_hh * p_vv) * (1.0 + 1e-12) + 1e-15)
    throw InputError("state coherence exceeds sqrt(p_hh*p_vv)");
}

TwoPhotonState TwoPhotonState::pure(double delta_phi) { return {0.5, 0.5, 0.5 * std::polar(1.0, delta_phi)}; }

const char* to_string(BellTarget target) { return target == BellTarget::phi_plus ? "phi_plus" : "phi_minus"; }

double pure_state_fidelity(double delta_phi, BellTarget target) {
  const double c = std::cos(delta_phi);
  return target == BellTarget::phi_minus ? 0.5 * (1.0 - c) : 0.5 * (1.0 + c);
}

TwoPhotonState mix_over_phases(const std::vector<std::pair<double, double>>& weighted_phases) {
  if (weighted_phases.empty()) throw InputError("phase mixture needs at least one component");
  double total = 0.0;
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [w, phi] : weighted_phases) {
    if (!(w >= 0.0)) throw InputError("phase mixture weights must be non-negative");
    total += w;
    sum += w * std::polar(1.0, phi);
  }
  if (!(total > 0.0)) throw InputError("phase mixture weights sum to zero");
  return {0.5, 0.5, 0.5 * sum / total};
}

double state_fidelity(const TwoPhotonState& state, BellTarget target) {
  state.validate();
  const double base = 0.5 * (state.p_hh + state.p_vv);
  return target == BellTarget::phi_minus ? base - state.coherence.real() : base + state.coherence.real();
}

double polarizer_probability(const TwoPhotonState& state, double theta_deg) {
  const double c2 = std::pow(std::cos(deg_to_rad(theta_deg)), 2);
  const double s2 = 1.0 - c2;
  return state.p_hh * c2 * c2 + state.p_vv * s2 * s2 + 2.0 * state.coherence.real() * c2 * s2;
}

PolarizerScan polarizer_curve(const TwoPhotonState& state, const std::vector<double>& angles_deg) {
  state.validate();
  if (angles_deg.empty()) throw InputError("polarizer scan needs angles");
  const auto [lo, hi] = std::minmax_element(angles_deg.begin(), angles_deg.end());
  if (*hi - *lo < 180.0 - 1e-9) throw InputError("polarizer angles must span at least 180 degrees");
  PolarizerScan scan;
  scan.angles_deg = angles_deg;
  for (double a : angles_deg) scan.probabilities.push_back(std::max(0.0, polarizer_probability(state, a)));
  return scan;
}

PolarizerFit fit_polarizer_curve(const std::vector<double>& angles_deg, const std::vector<double>& values,
                                 std::optional<double> imbalance) {
  const auto n = static_cast<Eigen::Index>(angles_deg.size());
  if (angles_deg.size() != values.size()) throw InputError("polarizer fit: angle and value counts differ");
  if (n < 8) throw InputError("polarizer fit needs at least 8 samples");
  const double b = imbalance.value_or(0.0);
  if (!(std::abs(b) < 1.0)) throw InputError("polarizer imbalance must lie in (-1, 1)");
  const double p_hh = 0.5 * (1.0 + b);
  const double p_vv = 0.5 * (1.0 - b);

  // values ≈ scale·f(θ) + (scale·Re c)·g(θ)
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c2 = std::pow(std::cos(deg_to_rad(angles_deg[static_cast<std::size_t>(i)])), 2);
    const double s2 = 1.0 - c2;
    a(i, 0) = p_hh * c2 * c2 + p_vv * s2 * s2;
    a(i, 1) = 2.0 * c2 * s2;
    y(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = y - a * x;
  const double rss = r.squaredNorm();
  const double rms = std::sqrt(rss / static_cast<double>(n));
  if (!lu.isInvertible() || !(x(0) > 0.0)) {
    std::ostringstream os;
    os << "polarizer fit did not converge (scale " << x(0) << "); residuals:";
    for (Eigen::Index i = 0; i < n; ++i) os << ' ' << r(i);
    throw DiagnosticError(os.str());
  }
  const Eigen::Matrix2d cov = (rss / static_cast<double>(n - 2)) * ata.inverse();

  PolarizerFit fit;
  fit.scale = x(0);
  fit.re_coherence = x(1) / x(0);
  // Delta method for Re c = B / A.
  const double ga = -x(1) / (x(0) * x(0));
  const double gb = 1.0 / x(0);
  const double var_re = ga * ga * cov(0, 0) + gb * gb * cov(1, 1) + 2.0 * ga * gb * cov(0, 1);
  const double sigma_re = std::sqrt(std::max(var_re, 0.0));
  const double limit = std::sqrt(p_hh * p_vv);
  const double re = std::clamp(fit.re_coherence, -limit, limit);
  fit.visibility = std::min(1.0, 2.0 * std::abs(re));
  fit.mean_phase_rad = re < 0.0 ? kPi : 0.0;
  fit.fidelity = 0.5 - re;
  fit.sigma_visibility = 2.0 * sigma_re;
  fit.sigma_fidelity = sigma_re;
  fit.sigma_scale = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.residual_rms = rms;
  return fit;
}

double fidelity_to_qber(double fidelity) {
  if (!(fidelity >= 0.5 && fidelity <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "fidelity " << fidelity << " outside the [0.5, 1] range of the QBER model";
    throw DomainError(os.str());
  }
  return std::max(0.0, 1.0 - fidelity);
}

}  // namespace spdc
