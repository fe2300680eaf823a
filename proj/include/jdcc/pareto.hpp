// SPDX-License-Identifier: Apache-2.0
//
// Delay / control-variance trade-off of a base station that splits one
// downlink power budget between a communication user (CU) and a
// controllable device (CD).
//
// Boundary points are parameterised by the CD's target downlink SINR
// gamma_d. For each target the CU SINR is maximised subject to
// SINR_D >= gamma_d and ||w_D||^2 + ||w_U||^2 <= P_dn:
//   * pareto: numerical optimum over regularised beam directions
//   * mrt / zf: closed-form power splits for fixed beam directions
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jdcc/channel.hpp"
#include "jdcc/control.hpp"

namespace jdcc {

enum class Scheme { pareto, mrt, zf, comm_only, ctrl_only };

std::string to_string(Scheme s);

struct PowerSplit {
  double p_d = 0.0;
  double p_u = 0.0;
};

/// One operating point. Unbounded delay or variance is std::nullopt.
struct TradeoffPoint {
  double gamma_d = 0.0;
  std::optional<double> tau_u;
  std::optional<double> v_inf;
  Scheme scheme = Scheme::pareto;
  PowerSplit power;
  std::optional<Beamformer> beams;
};

struct ParetoSolverReport {
  double gamma_u_star = 0.0;
  /// Regularisation weights of the optimal directions. Infinity marks a
  /// pure zero-forcing direction.
  double mu_u = 0.0;
  double mu_d = 0.0;
  /// Multipliers recovered from the stationarity conditions; empty when a
  /// weight is 0 or infinite and the recovery is undefined.
  std::optional<double> nu;
  std::optional<double> lambda;
  double power_slack = 0.0;  ///< |p_d + p_u - P_dn| / P_dn
  double sinr_slack = 0.0;   ///< |SINR_D - gamma_d| / gamma_d
  int iterations = 0;
};

/// Q_U / (B_dn log2(1 + gamma_u)); unbounded when gamma_u == 0.
std::optional<double> comm_delay(double gamma_u, const SystemConfig& cfg);

/// Largest control SINR: all power on the CD's MRT beam.
double gamma_d_max_mrt(const SystemConfig& cfg, const ChannelPair& ch);
/// Largest control SINR reachable with a zero-forcing control beam.
double gamma_d_max_zf(const SystemConfig& cfg, const ChannelPair& ch);
/// Max control SINR for a scheme (pareto uses the MRT bound).
double gamma_d_max(Scheme scheme, const SystemConfig& cfg, const ChannelPair& ch);

TradeoffPoint comm_only_point(const SystemConfig& cfg, const ChannelPair& ch);
/// Throws InfeasibleTarget when the uplink cannot stabilise the loop even
/// with all downlink power on the CD.
TradeoffPoint control_only_point(const SystemConfig& cfg, const ChannelPair& ch);

/// Throws InfeasibleTarget unless 0 < gamma_d <= gamma_d_max_mrt.
PowerSplit mrt_power_allocation(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch);
/// Throws InfeasibleTarget unless rho < 1 and 0 < gamma_d <= gamma_d_max_zf.
PowerSplit zf_power_allocation(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch);

/// Also throws InfeasibleTarget when gamma_d does not stabilise the loop.
TradeoffPoint mrt_region_point(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch,
                               double s_alpha);
TradeoffPoint zf_region_point(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch,
                              double s_alpha);

/// Unit vector along (I + mu h_i h_i^H)^{-1} h_t, via the rank-one inverse.
CVec regularized_direction(std::span<const cdouble> h_target, std::span<const cdouble> h_interf,
                           double mu);

// Pareto-optimal point for a control-SINR target.
//
// Beams are restricted to span{h_D, h_U} and take the regularised form
// w_D ~ (I + mu_U h_U h_U^H)^{-1} h_D, w_U ~ (I + mu_D h_D h_D^H)^{-1} h_U.
// Each weight is searched through s = mu ||h||^2 / (1 + mu ||h||^2) in [0, 1]
// (s = 0 is MRT, s = 1 is ZF). For fixed directions both constraints are
// active, so the powers solve a 2x2 linear system. The CU SINR is then
// maximised by a 65x65 grid followed by Nelder-Mead refinement.
//
// Throws InfeasibleTarget when gamma_d is outside (gamma_min, gamma_max],
// SolverFailure when the final residuals exceed 1e-8.
std::pair<TradeoffPoint, ParetoSolverReport> pareto_point(double gamma_d, const SystemConfig& cfg,
                                                          const ChannelPair& ch, double s_alpha);

struct SweepEntry {
  double gamma_d = 0.0;
  std::optional<TradeoffPoint> point;
  std::string error;  ///< set when point is empty
};

/// Evaluates each grid value independently (in parallel); output order
/// follows the grid. Per-point failures are recorded, not thrown.
std::vector<SweepEntry> sweep_boundary(Scheme scheme, const std::vector<double>& gamma_grid,
                                       const SystemConfig& cfg, const ChannelPair& ch,
                                       double s_alpha);

/// n targets with 1 + gamma log-spaced over (1 + gamma_min, 1 + gamma_max];
/// the lower end is excluded, the upper end included.
std::vector<double> sinr_grid(double gamma_min, double gamma_max, int n);

/// MRT/ZF delay crossover power; std::nullopt for orthogonal channels.
/// Throws DegenerateGeometry when the leading coefficient vanishes.
std::optional<double> mrt_zf_crossover_power(double gamma_d, const ChannelPair& ch, double sigma_dn2);

}  // namespace jdcc
