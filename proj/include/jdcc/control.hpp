// SPDX-License-Identifier: Apache-2.0
//
// Scalar plant under rate-limited uplink state reporting and downlink
// command delivery. Both links are modelled through the Gaussian
// rate-distortion limit, so each link is summarised by one quality factor
// (1 + SNR)^(bandwidth * sampling period) and the state variance follows
// a first-order affine recursion.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace jdcc {

/// x_{n+1} = a x_n + b u_n + w_n with w_n ~ CN(0, sigma_w2).
struct Plant {
  std::complex<double> a{1.2, 1.2};
  std::complex<double> b{1.0, 0.0};
  double sigma_w2 = 1e-2;

  double a_sq() const noexcept { return std::norm(a); }
  double b_sq() const noexcept { return std::norm(b); }
  /// Throws DomainError unless |a| > 1, b != 0 and sigma_w2 > 0.
  void validate() const;
};

/// Uplink and downlink quality factors S_alpha = (1+SNR_up)^alpha_up and
/// Gamma_alpha = (1+SINR_dn)^alpha_dn. Both are >= 1.
struct LinkQuality {
  double s_alpha;
  double gamma_alpha;
};

/// Steady-state variance, or std::nullopt when the loop is not mean-square
/// stable. Callers must branch on the unstable case explicitly.
using Variance = std::optional<double>;

double uplink_distortion(double variance, double s_alpha);

/// Distortion of the reconstructed command d = -(a/b) x_hat. Throws
/// DomainError when d_up > variance.
double downlink_distortion(double variance, double d_up, const Plant& plant, double gamma_alpha);

/// Slope of the affine variance map: |a|^2 (1/S + 1/G - 1/(S G)).
double contraction_factor(const Plant& plant, LinkQuality q);

double variance_step(double variance, const Plant& plant, LinkQuality q);

/// Strict mean-square stability; the boundary (slope exactly 1) is unstable.
bool is_stable(const Plant& plant, LinkQuality q);

Variance steady_state_variance(const Plant& plant, LinkQuality q);

enum class AsymptoticRegime { both_high, uplink_high, downlink_high };

/// Limits of the steady-state variance when one or both links become
/// perfect. `finite_quality` is the remaining link's quality factor and is
/// ignored for both_high. Throws DomainError if finite_quality <= |a|^2.
double asymptotic_variance(AsymptoticRegime regime, const Plant& plant, double finite_quality = 0.0);

struct ControlThreshold {
  double gamma_alpha;  ///< downlink quality factor that achieves the target exactly
  double sinr;         ///< corresponding linear downlink SINR
};

/// Downlink requirement that makes the steady-state variance equal to
/// v_target for a fixed uplink quality. Throws InfeasibleTarget when
/// v_target <= sigma_w2 or the uplink cannot support the target.
ControlThreshold control_threshold(double v_target, double s_alpha, const Plant& plant, double alpha_dn);

/// Smallest downlink SINR with a stable loop (exclusive bound). Throws
/// DomainError when s_alpha <= |a|^2.
double min_stabilizing_sinr(double s_alpha, const Plant& plant, double alpha_dn);

/// v0 followed by `steps` applications of variance_step.
std::vector<double> variance_trajectory(double v0, int steps, const Plant& plant, LinkQuality q);

struct FixedPointResult {
  double value;
  std::int64_t steps;
  bool converged;
};

// Iterates variance_step from v0 until the a-posteriori distance bound
// c/(1-c) * |V_{n+1} - V_n| falls below 1e-12 * V_{n+1}, or 10^6 steps.
// Unstable inputs return converged = false.
FixedPointResult iterate_to_fixed_point(double v0, const Plant& plant, LinkQuality q,
                                        std::int64_t max_steps = 1'000'000);

}  // namespace jdcc
