// SPDX-License-Identifier: Apache-2.0
//
// Outage probabilities over i.i.d. Rayleigh fading. Gains are normalised
// by their large-scale coefficient, so G_D = ||h_D||^2 / beta_D and
// G_U = ||h_U||^2 / beta_U are Gamma(M, 1), and rho has density
// (M-1)(1-r)^(M-2).
#pragma once

#include "jdcc/channel.hpp"

namespace jdcc {

/// Delay and steady-state variance requirements.
struct OutageSpec {
  double tau_req = 1e-2;
  double v_req = 3e-2;

  /// Throws InputError unless tau_req > 0 and v_req > sigma_w2.
  void validate(const Plant& plant) const;
};

struct OutageThresholds {
  double gamma_u_req = 0.0;  ///< CU SINR needed for tau_req
  double eta_u = 0.0;        ///< G_U threshold under full-power MRT
  double eta_v = 0.0;        ///< G_D below which no downlink SINR meets v_req
  double gbar_up = 0.0;      ///< P_up beta_D / sigma_up^2
  double gbar_d = 0.0;       ///< P_dn beta_D / sigma_dn^2
};

OutageThresholds comm_thresholds(const OutageSpec& spec, const SystemConfig& cfg);

/// P(G_U < eta_U).
double comm_only_outage(const OutageSpec& spec, const SystemConfig& cfg);

/// Control SINR needed to reach v_req at normalised CD gain x. Throws
/// DomainError for x <= eta_V.
double gamma_d_req_of_gain(double x, const OutageSpec& spec, const SystemConfig& cfg);

/// Unique root of gbar_d x = gamma_d_req(x) on (eta_V, inf).
double eta_ctrl(const OutageSpec& spec, const SystemConfig& cfg);

/// P(G_D < eta_ctrl).
double control_only_outage(const OutageSpec& spec, const SystemConfig& cfg);

struct JointOutageOptions {
  double tail_mass = 1e-10;  ///< discarded upper tail of G_D
  double outer_tol = 1e-6;
  double inner_tol = 1e-7;
};

struct JointOutageResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Joint delay/variance outage for MRT and ZF beams with the power split
// chosen per draw. Success needs x > eta_ctrl; for given (x, r) the CU gain
// must then exceed a closed-form threshold. Throws QuadratureFailure if the
// adaptive quadrature misses its tolerance.
JointOutageResult joint_outage_mrt(const OutageSpec& spec, const SystemConfig& cfg,
                                   const JointOutageOptions& opts = {});
JointOutageResult joint_outage_zf(const OutageSpec& spec, const SystemConfig& cfg,
                                  const JointOutageOptions& opts = {});

/// Largest correlation with a feasible MRT split at normalised CD gain x
/// (0 when x <= eta_ctrl).
double mrt_corr_limit(double x, const OutageSpec& spec, const SystemConfig& cfg);

}  // namespace jdcc
