// SPDX-License-Identifier: Apache-2.0
#include "jdcc/outage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "jdcc/errors.hpp"
#include "jdcc/numeric.hpp"

namespace jdcc {

void OutageSpec::validate(const Plant& plant) const {
  if (!(tau_req > 0.0)) throw InputError("outage: tau_req must be positive");
  if (!(v_req > plant.sigma_w2)) throw InputError("outage: v_req must exceed sigma_w2");
}

OutageThresholds comm_thresholds(const OutageSpec& spec, const SystemConfig& cfg) {
  spec.validate(cfg.plant);
  OutageThresholds t;
  t.gamma_u_req = std::exp2(cfg.payload_bits / (cfg.b_dn * spec.tau_req)) - 1.0;
  t.eta_u = t.gamma_u_req * cfg.sigma_dn2() / (cfg.p_dn * cfg.beta_u());
  t.gbar_up = cfg.p_up * cfg.beta_d() / cfg.sigma_up2();
  t.gbar_d = cfg.p_dn * cfg.beta_d() / cfg.sigma_dn2();
  const double a2 = cfg.plant.a_sq();
  const double s_min = a2 * spec.v_req / (spec.v_req - cfg.plant.sigma_w2);
  t.eta_v = (std::pow(s_min, 1.0 / cfg.alpha_up()) - 1.0) / t.gbar_up;
  return t;
}

double comm_only_outage(const OutageSpec& spec, const SystemConfig& cfg) {
  return gamma_cdf(cfg.antennas, comm_thresholds(spec, cfg).eta_u);
}

namespace {

// gamma_d_req without the domain check: +inf where the target is unreachable.
double required_sinr(double x, const OutageSpec& spec, const SystemConfig& cfg, double gbar_up) {
  const double a2 = cfg.plant.a_sq();
  const double v = spec.v_req;
  const double s = std::pow(1.0 + gbar_up * x, cfg.alpha_up());
  const double denom = s * (v - cfg.plant.sigma_w2) - a2 * v;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(a2 * v * (s - 1.0) / denom, 1.0 / cfg.alpha_dn()) - 1.0;
}

}  // namespace

double gamma_d_req_of_gain(double x, const OutageSpec& spec, const SystemConfig& cfg) {
  const OutageThresholds t = comm_thresholds(spec, cfg);
  if (!(x > t.eta_v)) throw DomainError("gamma_d_req_of_gain: x must exceed eta_V");
  const double g = required_sinr(x, spec, cfg, t.gbar_up);
  if (std::isinf(g)) throw DomainError("gamma_d_req_of_gain: x too close to eta_V");
  return g;
}

namespace {

double eta_ctrl_from(const OutageThresholds& t, const OutageSpec& spec, const SystemConfig& cfg) {
  auto gap = [&](double x) {
    const double g = required_sinr(x, spec, cfg, t.gbar_up);
    return std::isinf(g) ? -1.0 : t.gbar_d * x - g;
  };
  double lo = t.eta_v;
  double hi = std::max(2.0 * t.eta_v, 1.0);
  while (gap(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw SolverFailure("eta_ctrl: no crossing found", hi);
  }
  return bisect(gap, lo, hi, 1e-13).root;
}

// Point beyond which Gamma(M, 1) keeps less than `mass`.
double tail_cutoff(int shape, double mass) {
  double x = static_cast<double>(shape);
  while (gamma_sf(shape, x) >= mass) x *= 1.25;
  return x;
}

template <typename Inner>
JointOutageResult joint_outage(const OutageSpec& spec, const SystemConfig& cfg,
                               const JointOutageOptions& opts, Inner inner_upper_and_threshold) {
  const OutageThresholds t = comm_thresholds(spec, cfg);
  const int m = cfg.antennas;
  const double x_lo = eta_ctrl_from(t, spec, cfg);
  const double x_hi = tail_cutoff(m, opts.tail_mass);
  if (x_lo >= x_hi) return {1.0, opts.tail_mass};

  bool inner_failed = false;
  double worst_inner = 0.0;
  auto outer = [&](double x) {
    const double eta_f = required_sinr(x, spec, cfg, t.gbar_up) / t.gbar_d;
    const auto bounds = inner_upper_and_threshold(x, eta_f, t);
    const double r_top = bounds.first;
    const auto& threshold = bounds.second;
    if (!(r_top > 0.0)) return 0.0;
    auto f = [&](double r) {
      const double y = threshold(r);
      return corr_pdf(m, r) * gamma_sf(m, y);
    };
    const QuadratureResult q = integrate_gk15(f, 0.0, r_top, opts.inner_tol);
    if (!q.converged) {
      inner_failed = true;
      worst_inner = std::max(worst_inner, q.error);
    }
    return gamma_pdf(m, x) * q.value;
  };
  const QuadratureResult q = integrate_gk15(outer, x_lo, x_hi, opts.outer_tol);
  if (inner_failed) throw QuadratureFailure("joint outage: inner quadrature did not converge", worst_inner);
  if (!q.converged) throw QuadratureFailure("joint outage: outer quadrature did not converge", q.error);
  return {std::clamp(1.0 - q.value, 0.0, 1.0), q.error + opts.tail_mass};
}

// Positive root of x gU gD r^2 + eta_f gU r - (x - eta_f) = 0, in a form
// without cancellation.
double mrt_root(double x, double eta_f, double g_u, double g_d) {
  if (!(x > eta_f)) return 0.0;
  const double b = eta_f * g_u;
  const double disc = b * b + 4.0 * x * g_u * g_d * (x - eta_f);
  return std::min(1.0, 2.0 * (x - eta_f) / (b + std::sqrt(disc)));
}

}  // namespace

double eta_ctrl(const OutageSpec& spec, const SystemConfig& cfg) {
  return eta_ctrl_from(comm_thresholds(spec, cfg), spec, cfg);
}

double control_only_outage(const OutageSpec& spec, const SystemConfig& cfg) {
  return gamma_cdf(cfg.antennas, eta_ctrl(spec, cfg));
}

double mrt_corr_limit(double x, const OutageSpec& spec, const SystemConfig& cfg) {
  const OutageThresholds t = comm_thresholds(spec, cfg);
  if (!(x > t.eta_v)) return 0.0;
  const double g_d = required_sinr(x, spec, cfg, t.gbar_up);
  if (std::isinf(g_d)) return 0.0;
  return mrt_root(x, g_d / t.gbar_d, t.gamma_u_req, g_d);
}

JointOutageResult joint_outage_mrt(const OutageSpec& spec, const SystemConfig& cfg,
                                   const JointOutageOptions& opts) {
  return joint_outage(spec, cfg, opts, [&](double x, double eta_f, const OutageThresholds& t) {
    const double g_u = t.gamma_u_req;
    const double g_d = eta_f * t.gbar_d;
    const double eta_u = t.eta_u;
    auto psi = [=](double r) {
      const double den = x * (1.0 - g_u * g_d * r * r) - eta_f * (1.0 + g_u * r);
      if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
      return eta_u * x * (1.0 + g_d * r) / den;
    };
    return std::make_pair(mrt_root(x, eta_f, g_u, g_d), std::function<double(double)>(psi));
  });
}

JointOutageResult joint_outage_zf(const OutageSpec& spec, const SystemConfig& cfg,
                                  const JointOutageOptions& opts) {
  return joint_outage(spec, cfg, opts, [&](double x, double eta_f, const OutageThresholds& t) {
    const double eta_u = t.eta_u;
    auto phi = [=](double r) {
      const double den = (1.0 - r) * x - eta_f;
      if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
      return eta_u * x / den;
    };
    const double r_top = std::max(0.0, 1.0 - eta_f / x);
    return std::make_pair(r_top, std::function<double(double)>(phi));
  });
}

}  // namespace jdcc
