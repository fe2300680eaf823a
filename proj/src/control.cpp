// SPDX-License-Identifier: Apache-2.0
#include "jdcc/control.hpp"

#include <cmath>
#include <string>

#include "jdcc/errors.hpp"

namespace jdcc {

void Plant::validate() const {
  if (!(std::abs(a) > 1.0)) throw DomainError("plant: |a| must exceed 1");
  if (b == std::complex<double>{0.0, 0.0}) throw DomainError("plant: b must be nonzero");
  if (!(sigma_w2 > 0.0)) throw DomainError("plant: sigma_w2 must be positive");
}

namespace {

void check_quality(LinkQuality q) {
  if (!(q.s_alpha >= 1.0) || !(q.gamma_alpha >= 1.0)) {
    throw DomainError("link quality factors must be >= 1");
  }
}

}  // namespace

double uplink_distortion(double variance, double s_alpha) {
  if (!(variance >= 0.0)) throw DomainError("uplink_distortion: negative variance");
  if (!(s_alpha >= 1.0)) throw DomainError("uplink_distortion: S_alpha < 1");
  return variance / s_alpha;
}

double downlink_distortion(double variance, double d_up, const Plant& plant, double gamma_alpha) {
  if (!(d_up >= 0.0) || d_up > variance) {
    throw DomainError("downlink_distortion: requires 0 <= D_up <= V");
  }
  if (!(gamma_alpha >= 1.0)) throw DomainError("downlink_distortion: Gamma_alpha < 1");
  return plant.a_sq() / plant.b_sq() * (variance - d_up) / gamma_alpha;
}

double contraction_factor(const Plant& plant, LinkQuality q) {
  check_quality(q);
  const double inv_s = 1.0 / q.s_alpha;
  const double inv_g = 1.0 / q.gamma_alpha;
  return plant.a_sq() * (inv_s + inv_g - inv_s * inv_g);
}

double variance_step(double variance, const Plant& plant, LinkQuality q) {
  return contraction_factor(plant, q) * variance + plant.sigma_w2;
}

bool is_stable(const Plant& plant, LinkQuality q) {
  check_quality(q);
  const double s = q.s_alpha;
  const double g = q.gamma_alpha;
  // Infinite qualities are legal limits; keep the comparison finite.
  if (std::isinf(s) || std::isinf(g)) return contraction_factor(plant, q) < 1.0;
  return s * g > plant.a_sq() * (s + g - 1.0);
}

Variance steady_state_variance(const Plant& plant, LinkQuality q) {
  if (!is_stable(plant, q)) return std::nullopt;
  // sigma_w2 / (1 - c) is algebraically identical to the closed form
  // sigma S G / (S G - |a|^2 (S + G - 1)) and stays finite for infinite S or G.
  if (std::isinf(q.s_alpha) || std::isinf(q.gamma_alpha)) {
    return plant.sigma_w2 / (1.0 - contraction_factor(plant, q));
  }
  const double s = q.s_alpha;
  const double g = q.gamma_alpha;
  return plant.sigma_w2 * s * g / (s * g - plant.a_sq() * (s + g - 1.0));
}

double asymptotic_variance(AsymptoticRegime regime, const Plant& plant, double finite_quality) {
  if (regime == AsymptoticRegime::both_high) return plant.sigma_w2;
  if (!(finite_quality > plant.a_sq())) {
    throw DomainError("asymptotic_variance: finite quality must exceed |a|^2");
  }
  // Cases (2) and (3) share the same form in the remaining quality factor.
  return plant.sigma_w2 * finite_quality / (finite_quality - plant.a_sq());
}

ControlThreshold control_threshold(double v_target, double s_alpha, const Plant& plant, double alpha_dn) {
  if (!(alpha_dn > 0.0)) throw DomainError("control_threshold: alpha_dn must be positive");
  if (!(v_target > plant.sigma_w2)) {
    throw InfeasibleTarget("control_threshold: target variance must exceed sigma_w2");
  }
  const double a2 = plant.a_sq();
  const double denom = s_alpha * (v_target - plant.sigma_w2) - a2 * v_target;
  if (!(denom > 0.0)) {
    throw InfeasibleTarget("control_threshold: uplink quality too low for the variance target");
  }
  const double gamma_alpha = a2 * v_target * (s_alpha - 1.0) / denom;
  return {gamma_alpha, std::pow(gamma_alpha, 1.0 / alpha_dn) - 1.0};
}

double min_stabilizing_sinr(double s_alpha, const Plant& plant, double alpha_dn) {
  const double a2 = plant.a_sq();
  if (!(s_alpha > a2)) throw DomainError("min_stabilizing_sinr: S_alpha must exceed |a|^2");
  if (std::isinf(s_alpha)) return std::pow(a2, 1.0 / alpha_dn) - 1.0;
  return std::pow(a2 * (s_alpha - 1.0) / (s_alpha - a2), 1.0 / alpha_dn) - 1.0;
}

std::vector<double> variance_trajectory(double v0, int steps, const Plant& plant, LinkQuality q) {
  if (!(v0 >= 0.0)) throw DomainError("variance_trajectory: negative initial variance");
  if (steps < 1) throw DomainError("variance_trajectory: steps must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(v0);
  for (int n = 0; n < steps; ++n) out.push_back(variance_step(out.back(), plant, q));
  return out;
}

FixedPointResult iterate_to_fixed_point(double v0, const Plant& plant, LinkQuality q,
                                        std::int64_t max_steps) {
  const double c = contraction_factor(plant, q);
  double v = v0;
  if (!(c < 1.0)) {
    for (std::int64_t n = 0; n < 64; ++n) v = c * v + plant.sigma_w2;
    return {v, 64, false};
  }
  const double bound_scale = c / (1.0 - c);
  for (std::int64_t n = 1; n <= max_steps; ++n) {
    const double next = c * v + plant.sigma_w2;
    const double delta = std::fabs(next - v);
    v = next;
    if (bound_scale * delta <= 1e-12 * v || delta == 0.0) return {v, n, true};
  }
  return {v, max_steps, false};
}

}  // namespace jdcc
