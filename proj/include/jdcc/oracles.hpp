// SPDX-License-Identifier: Apache-2.0
//
// Slow, independent reference computations used by the acceptance suite
// and the unit tests. None of them share code paths with the routines they
// check beyond the basic SINR and variance definitions.
#pragma once

#include "jdcc/channel.hpp"
#include "jdcc/pareto.hpp"

namespace jdcc::oracle {

// Best CU SINR at control target gamma_d by exhaustive search over real
// unit beams in span{h_D, h_U} (after a phase rotation both channels are
// real there). A coarse angle grid is followed by repeated zoomed grids.
// Returns -1 when no direction reaches gamma_d.
double pareto_sinr_by_search(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch,
                             int coarse = 360, int zoom_levels = 8);

/// Gamma_alpha with steady_state_variance == v_target, by bisection on the
/// stable side of the boundary.
double threshold_quality_by_bisection(double v_target, double s_alpha, const Plant& plant);

struct GridFeasibility {
  bool feasible;
  /// Width of the feasible p_D interval implied by the grid, in watts
  /// (0 when infeasible).
  double width;
};

// Scans p_D over `points` values in [0, P_dn] with p_U = P_dn - p_D and
// reports whether some split meets both SINR targets, using the actual
// beam vectors (MRT or ZF) and downlink_sinrs.
GridFeasibility joint_feasible_by_grid(Scheme scheme, const ChannelPair& ch, const SystemConfig& cfg,
                                       double gamma_d_req, double gamma_u_req, int points = 1001);

}  // namespace jdcc::oracle
