// SPDX-License-Identifier: Apache-2.0
#include "jdcc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "jdcc/errors.hpp"

namespace jdcc::oracle {

namespace {

struct RealPair {
  double d1;        // h_D = (d1, 0)
  double u1, u2;    // h_U = (u1, u2)
};

RealPair real_coordinates(const ChannelPair& ch) {
  const double nd = std::sqrt(norm_sq(ch.h_d));
  const double nu2 = norm_sq(ch.h_u);
  const double c = std::abs(inner(ch.h_d, ch.h_u)) / nd;
  return {nd, c, std::sqrt(std::max(0.0, nu2 - c * c))};
}

// CU SINR for real beams at angles (td, tu) with full power and the
// smallest control power meeting gamma_d; -1 if unreachable.
double cu_sinr(const RealPair& h, double td, double tu, double gamma_d, double p, double s2) {
  const double cd = std::cos(td);
  const double sd = std::sin(td);
  const double cu = std::cos(tu);
  const double su = std::sin(tu);
  const double dd = (h.d1 * cd) * (h.d1 * cd);
  const double du = (h.d1 * cu) * (h.d1 * cu);
  const double ud = (h.u1 * cd + h.u2 * sd) * (h.u1 * cd + h.u2 * sd);
  const double uu = (h.u1 * cu + h.u2 * su) * (h.u1 * cu + h.u2 * su);
  const double den = dd + gamma_d * du;
  if (!(den > 0.0)) return -1.0;
  const double p_d = gamma_d * (p * du + s2) / den;
  if (p_d > p) return -1.0;
  return (p - p_d) * uu / (p_d * ud + s2);
}

}  // namespace

double pareto_sinr_by_search(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch, int coarse,
                             int zoom_levels) {
  const RealPair h = real_coordinates(ch);
  const double p = cfg.p_dn;
  const double s2 = cfg.sigma_dn2();
  const double pi = std::numbers::pi;
  double best = -1.0;
  double best_d = 0.0;
  double best_u = 0.0;
  const double step = pi / coarse;
  for (int i = 0; i < coarse; ++i) {
    for (int j = 0; j < coarse; ++j) {
      const double v = cu_sinr(h, i * step, j * step, gamma_d, p, s2);
      if (v > best) {
        best = v;
        best_d = i * step;
        best_u = j * step;
      }
    }
  }
  if (best < 0.0) return -1.0;
  double half = 2.0 * step;
  constexpr int kZoom = 40;
  for (int level = 0; level < zoom_levels; ++level) {
    const double c_d = best_d;
    const double c_u = best_u;
    for (int i = 0; i <= kZoom; ++i) {
      for (int j = 0; j <= kZoom; ++j) {
        const double td = c_d - half + 2.0 * half * i / kZoom;
        const double tu = c_u - half + 2.0 * half * j / kZoom;
        const double v = cu_sinr(h, td, tu, gamma_d, p, s2);
        if (v > best) {
          best = v;
          best_d = td;
          best_u = tu;
        }
      }
    }
    half *= 4.0 / kZoom;
  }
  return best;
}

double threshold_quality_by_bisection(double v_target, double s_alpha, const Plant& plant) {
  auto excess = [&](double g) {
    const Variance v = steady_state_variance(plant, {s_alpha, g});
    return v ? *v - v_target : std::numeric_limits<double>::infinity();
  };
  double lo = 1.0;
  double hi = 2.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InfeasibleTarget("threshold oracle: target unreachable");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

GridFeasibility joint_feasible_by_grid(Scheme scheme, const ChannelPair& ch, const SystemConfig& cfg,
                                       double gamma_d_req, double gamma_u_req, int points) {
  if (points < 2) throw DomainError("joint_feasible_by_grid: points must be >= 2");
  const double p = cfg.p_dn;
  const double s2 = cfg.sigma_dn2();
  int first = -1;
  int last = -1;
  for (int k = 0; k < points; ++k) {
    const double p_d = p * k / (points - 1);
    const Beamformer bf = scheme == Scheme::zf ? zf_beamformer(ch, p_d, p - p_d, p)
                                               : mrt_beamformer(ch, p_d, p - p_d, p);
    const DownlinkSinrs s = downlink_sinrs(ch, bf, s2);
    if (s.gamma_d >= gamma_d_req && s.gamma_u >= gamma_u_req) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) return {false, 0.0};
  return {true, p * (last - first) / (points - 1)};
}

}  // namespace jdcc::oracle
