#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace spdc {

/// Two-photon density operator restricted to {|HH⟩, |VV⟩}. `coherence` is the
/// off-diagonal element c with |ψ⟩ = (|HH⟩ + e^{iΔφ}|VV⟩)/√2 giving c = ½e^{iΔφ}.
struct TwoPhotonState {
  double p_hh = 0.5;
  double p_vv = 0.5;
  std::complex<double> coherence{0.0, 0.0};

  /// Throws InputError unless populations are non-negative, sum to 1 and
  /// |c| ≤ √(p_hh·p_vv).
  void validate() const;
  static TwoPhotonState pure(double delta_phi);
};

enum class BellTarget { phi_plus, phi_minus };

const char* to_string(BellTarget target);

/// F(Φ⁻) = (1 − cos Δφ)/2, F(Φ⁺) = (1 + cos Δφ)/2.
double pure_state_fidelity(double delta_phi, BellTarget target = BellTarget::phi_minus);

/// Balanced state with c = ½·Σ w_k e^{iΔφ_k} / Σ w_k. Pairs are (weight, Δφ).
TwoPhotonState mix_over_phases(const std::vector<std::pair<double, double>>& weighted_phases);

/// F(Φ±) = ½(p_hh + p_vv) ± Re c.
double state_fidelity(const TwoPhotonState& state, BellTarget target = BellTarget::phi_minus);

struct PolarizerFit {
  double visibility = 0.0;
  double mean_phase_rad = 0.0;
  double fidelity = 0.0;  // toward Φ⁻
  double scale = 0.0;
  double re_coherence = 0.0;
  double sigma_visibility = 0.0;
  double sigma_fidelity = 0.0;
  double sigma_scale = 0.0;
  double residual_rms = 0.0;
};

struct PolarizerScan {
  std::vector<double> angles_deg;
  std::vector<double> probabilities;
  std::optional<PolarizerFit> fit;
};

/// P(θ) = p_hh·cos⁴θ + p_vv·sin⁴θ + 2·Re(c)·cos²θ·sin²θ for one polarizer in
/// front of both photons.
double polarizer_probability(const TwoPhotonState& state, double theta_deg);

/// Throws InputError unless the angles span at least 180°.
PolarizerScan polarizer_curve(const TwoPhotonState& state, const std::vector<double>& angles_deg);

/// Linear least squares of scale·[p_hh cos⁴ + p_vv sin⁴ + 2 Re c cos² sin²]
/// with p_hh = (1 + imbalance)/2 (0 unless given). One polarizer fixes only
/// Re c, so V = |2 Re c| and φ̄ ∈ {0, π} follows its sign. Uncertainties come
/// from the residual scatter. Needs ≥ 8 samples; throws DiagnosticError with
/// the residuals when the fit is singular or the scale is not positive.
PolarizerFit fit_polarizer_curve(const std::vector<double>& angles_deg, const std::vector<double>& values,
                                 std::optional<double> imbalance = std::nullopt);

/// Diagonal-basis error rate 1 − F. Throws DomainError for F < ½ or F > 1.
double fidelity_to_qber(double fidelity);

}  // namespace spdc
