// SPDX-License-Identifier: Apache-2.0
#include "jdcc/pareto.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "jdcc/errors.hpp"

namespace jdcc {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::pareto: return "pareto";
    case Scheme::mrt: return "mrt";
    case Scheme::zf: return "zf";
    case Scheme::comm_only: return "comm-only";
    case Scheme::ctrl_only: return "ctrl-only";
  }
  return "unknown";
}

std::optional<double> comm_delay(double gamma_u, const SystemConfig& cfg) {
  if (!(gamma_u >= 0.0)) throw DomainError("comm_delay: negative SINR");
  if (gamma_u == 0.0) return std::nullopt;
  return cfg.payload_bits / (cfg.b_dn * std::log2(1.0 + gamma_u));
}

double gamma_d_max_mrt(const SystemConfig& cfg, const ChannelPair& ch) {
  return cfg.p_dn * ch.g_d / cfg.sigma_dn2();
}

double gamma_d_max_zf(const SystemConfig& cfg, const ChannelPair& ch) {
  return (1.0 - ch.rho) * cfg.p_dn * ch.g_d / cfg.sigma_dn2();
}

double gamma_d_max(Scheme scheme, const SystemConfig& cfg, const ChannelPair& ch) {
  return scheme == Scheme::zf ? gamma_d_max_zf(cfg, ch) : gamma_d_max_mrt(cfg, ch);
}

TradeoffPoint comm_only_point(const SystemConfig& cfg, const ChannelPair& ch) {
  TradeoffPoint pt;
  pt.scheme = Scheme::comm_only;
  pt.gamma_d = 0.0;
  pt.tau_u = comm_delay(cfg.p_dn * ch.g_u / cfg.sigma_dn2(), cfg);
  pt.v_inf = std::nullopt;
  pt.power = {0.0, cfg.p_dn};
  pt.beams = mrt_beamformer(ch, 0.0, cfg.p_dn, cfg.p_dn);
  return pt;
}

TradeoffPoint control_only_point(const SystemConfig& cfg, const ChannelPair& ch) {
  const double s_alpha = uplink_quality(cfg, ch);
  const double gamma_max = gamma_d_max_mrt(cfg, ch);
  const LinkQuality q{s_alpha, std::pow(1.0 + gamma_max, cfg.alpha_dn())};
  const Variance v = steady_state_variance(cfg.plant, q);
  if (!v) throw InfeasibleTarget("control_only_point: loop unstable even with full downlink power");
  TradeoffPoint pt;
  pt.scheme = Scheme::ctrl_only;
  pt.gamma_d = gamma_max;
  pt.tau_u = std::nullopt;
  pt.v_inf = v;
  pt.power = {cfg.p_dn, 0.0};
  pt.beams = mrt_beamformer(ch, cfg.p_dn, 0.0, cfg.p_dn);
  return pt;
}

namespace {

constexpr double kEndpointTol = 1e-12;

Variance variance_at(double gamma_d, const SystemConfig& cfg, double s_alpha) {
  if (!(s_alpha >= 1.0)) throw DomainError("S_alpha must be >= 1");
  return steady_state_variance(cfg.plant, {s_alpha, std::pow(1.0 + gamma_d, cfg.alpha_dn())});
}

void require_stable(const Variance& v, double gamma_d) {
  if (!v) {
    throw InfeasibleTarget("control SINR " + std::to_string(gamma_d) +
                           " does not stabilise the loop");
  }
}

}  // namespace

PowerSplit mrt_power_allocation(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch) {
  const double g_max = gamma_d_max_mrt(cfg, ch);
  if (!(gamma_d > 0.0) || gamma_d > g_max * (1.0 + kEndpointTol)) {
    throw InfeasibleTarget("mrt_power_allocation: control SINR outside (0, gamma_max]");
  }
  const double s2 = cfg.sigma_dn2();
  double p_d = gamma_d * (cfg.p_dn * ch.rho * ch.g_d + s2) / (ch.g_d * (1.0 + gamma_d * ch.rho));
  if (gamma_d >= g_max * (1.0 - kEndpointTol)) p_d = cfg.p_dn;
  p_d = std::min(p_d, cfg.p_dn);
  return {p_d, cfg.p_dn - p_d};
}

PowerSplit zf_power_allocation(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch) {
  if (!(ch.rho < 1.0)) throw InfeasibleTarget("zf_power_allocation: collinear channels");
  const double g_max = gamma_d_max_zf(cfg, ch);
  if (!(gamma_d > 0.0) || gamma_d > g_max * (1.0 + kEndpointTol)) {
    throw InfeasibleTarget("zf_power_allocation: control SINR exceeds the zero-forcing maximum");
  }
  double p_d = gamma_d * cfg.sigma_dn2() / (ch.g_d * (1.0 - ch.rho));
  if (gamma_d >= g_max * (1.0 - kEndpointTol)) p_d = cfg.p_dn;
  p_d = std::min(p_d, cfg.p_dn);
  return {p_d, cfg.p_dn - p_d};
}

TradeoffPoint mrt_region_point(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch,
                               double s_alpha) {
  const PowerSplit p = mrt_power_allocation(gamma_d, cfg, ch);
  const Variance v = variance_at(gamma_d, cfg, s_alpha);
  require_stable(v, gamma_d);
  const double gamma_u = p.p_u * ch.g_u / (p.p_d * ch.rho * ch.g_u + cfg.sigma_dn2());
  TradeoffPoint pt;
  pt.scheme = Scheme::mrt;
  pt.gamma_d = gamma_d;
  pt.tau_u = comm_delay(gamma_u, cfg);
  pt.v_inf = v;
  pt.power = p;
  pt.beams = mrt_beamformer(ch, p.p_d, p.p_u, cfg.p_dn);
  return pt;
}

TradeoffPoint zf_region_point(double gamma_d, const SystemConfig& cfg, const ChannelPair& ch,
                              double s_alpha) {
  const PowerSplit p = zf_power_allocation(gamma_d, cfg, ch);
  const Variance v = variance_at(gamma_d, cfg, s_alpha);
  require_stable(v, gamma_d);
  const double gamma_u = p.p_u * ch.g_u * (1.0 - ch.rho) / cfg.sigma_dn2();
  TradeoffPoint pt;
  pt.scheme = Scheme::zf;
  pt.gamma_d = gamma_d;
  pt.tau_u = comm_delay(gamma_u, cfg);
  pt.v_inf = v;
  pt.power = p;
  pt.beams = zf_beamformer(ch, p.p_d, p.p_u, cfg.p_dn);
  return pt;
}

namespace {

// h_t - h_i * (s / ||h_i||^2) (h_i^H h_t), normalised; s in [0, 1].
CVec regularized_unit(std::span<const cdouble> h_target, std::span<const cdouble> h_interf, double s) {
  CVec out(h_target.begin(), h_target.end());
  const double ni = norm_sq(h_interf);
  if (ni > 0.0 && s > 0.0) {
    const cdouble coef = (s / ni) * inner(h_interf, h_target);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= coef * h_interf[k];
  }
  const double n = norm_sq(out);
  if (n > 0.0) {
    const double inv = 1.0 / std::sqrt(n);
    for (auto& e : out) e *= inv;
  }
  return out;
}

}  // namespace

CVec regularized_direction(std::span<const cdouble> h_target, std::span<const cdouble> h_interf,
                           double mu) {
  if (!(mu >= 0.0)) throw DomainError("regularized_direction: mu must be >= 0");
  if (!(norm_sq(h_target) > 0.0)) throw DomainError("regularized_direction: zero target");
  const double kappa = mu * norm_sq(h_interf);
  // (I + mu h h^H)^{-1} = I - mu h h^H / (1 + mu ||h||^2)
  const double s = std::isinf(kappa) ? 1.0 : kappa / (1.0 + kappa);
  return regularized_unit(h_target, h_interf, s);
}

namespace {

// Normalised gains of one beam direction: SNR-scale (P |h^H u|^2 / sigma^2).
struct BeamGains {
  double own;    ///< toward the intended user
  double cross;  ///< leakage toward the other user
};

struct ParetoProblem {
  const ChannelPair& ch;
  double gamma_d;
  double snr_scale;  // P_dn / sigma_dn^2

  BeamGains control_beam(double s_u) const {
    const CVec u = regularized_unit(ch.h_d, ch.h_u, s_u);
    return {snr_scale * std::norm(inner(ch.h_d, u)), snr_scale * std::norm(inner(ch.h_u, u))};
  }
  BeamGains comm_beam(double s_d) const {
    const CVec u = regularized_unit(ch.h_u, ch.h_d, s_d);
    return {snr_scale * std::norm(inner(ch.h_u, u)), snr_scale * std::norm(inner(ch.h_d, u))};
  }

  // Fraction of P_dn on the CU beam with both constraints active; negative
  // means the directions cannot reach gamma_d.
  double comm_fraction(const BeamGains& ctrl, const BeamGains& comm) const {
    return (ctrl.own - gamma_d) / (ctrl.own + gamma_d * comm.cross);
  }

  double comm_sinr(const BeamGains& ctrl, const BeamGains& comm) const {
    const double f_u = comm_fraction(ctrl, comm);
    if (f_u < 0.0) return -1.0;
    return f_u * comm.own / ((1.0 - f_u) * ctrl.cross + 1.0);
  }

  double objective(double s_u, double s_d) const {
    return comm_sinr(control_beam(s_u), comm_beam(s_d));
  }
};

struct Vertex {
  double s_u, s_d, value;
};

// Nelder-Mead maximisation on the unit square (coordinates clamped).
Vertex nelder_mead(const ParetoProblem& prob, Vertex start, double step, int& iterations) {
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  auto eval = [&](double a, double b) {
    a = clamp01(a);
    b = clamp01(b);
    return Vertex{a, b, prob.objective(a, b)};
  };
  std::array<Vertex, 3> simplex = {
      start,
      eval(start.s_u + (start.s_u + step <= 1.0 ? step : -step), start.s_d),
      eval(start.s_u, start.s_d + (start.s_d + step <= 1.0 ? step : -step)),
  };
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.value > b.value; };
  for (int it = 0; it < 2000; ++it) {
    ++iterations;
    std::sort(simplex.begin(), simplex.end(), by_value);
    double diameter = 0.0;
    for (int i = 1; i < 3; ++i) {
      diameter = std::max({diameter, std::fabs(simplex[i].s_u - simplex[0].s_u),
                           std::fabs(simplex[i].s_d - simplex[0].s_d)});
    }
    if (diameter < 1e-10) break;
    const double cu = 0.5 * (simplex[0].s_u + simplex[1].s_u);
    const double cd = 0.5 * (simplex[0].s_d + simplex[1].s_d);
    const Vertex& worst = simplex[2];
    const Vertex refl = eval(cu + (cu - worst.s_u), cd + (cd - worst.s_d));
    if (refl.value > simplex[0].value) {
      const Vertex expd = eval(cu + 2.0 * (cu - worst.s_u), cd + 2.0 * (cd - worst.s_d));
      simplex[2] = expd.value > refl.value ? expd : refl;
    } else if (refl.value > simplex[1].value) {
      simplex[2] = refl;
    } else {
      const Vertex contr = eval(cu + 0.5 * (worst.s_u - cu), cd + 0.5 * (worst.s_d - cd));
      if (contr.value > worst.value) {
        simplex[2] = contr;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = eval(simplex[0].s_u + 0.5 * (simplex[i].s_u - simplex[0].s_u),
                            simplex[0].s_d + 0.5 * (simplex[i].s_d - simplex[0].s_d));
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex[0];
}

double weight_from_s(double s, double gain) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0 || gain <= 0.0) return std::numeric_limits<double>::infinity();
  return s / (1.0 - s) / gain;
}

}  // namespace

std::pair<TradeoffPoint, ParetoSolverReport> pareto_point(double gamma_d, const SystemConfig& cfg,
                                                          const ChannelPair& ch, double s_alpha) {
  if (!(ch.g_d > 0.0)) throw InfeasibleTarget("pareto_point: zero control channel");
  const double g_max = gamma_d_max_mrt(cfg, ch);
  if (!(s_alpha > cfg.plant.a_sq())) {
    throw InfeasibleTarget("pareto_point: uplink quality cannot stabilise the loop");
  }
  const double g_min = min_stabilizing_sinr(s_alpha, cfg.plant, cfg.alpha_dn());
  if (!(gamma_d > g_min) || gamma_d > g_max * (1.0 + kEndpointTol)) {
    throw InfeasibleTarget("pareto_point: control SINR outside (gamma_min, gamma_max]");
  }
  const Variance v = variance_at(gamma_d, cfg, s_alpha);
  require_stable(v, gamma_d);

  const double s2 = cfg.sigma_dn2();
  const ParetoProblem prob{ch, gamma_d, cfg.p_dn / s2};
  ParetoSolverReport report;
  TradeoffPoint pt;
  pt.scheme = Scheme::pareto;
  pt.gamma_d = gamma_d;
  pt.v_inf = v;

  if (gamma_d >= g_max * (1.0 - kEndpointTol)) {
    // Only the full-power MRT control beam reaches gamma_max.
    pt.power = {cfg.p_dn, 0.0};
    pt.beams = mrt_beamformer(ch, cfg.p_dn, 0.0, cfg.p_dn);
    pt.tau_u = std::nullopt;
    const DownlinkSinrs sinr = downlink_sinrs(ch, *pt.beams, s2);
    report.gamma_u_star = 0.0;
    report.sinr_slack = std::fabs(sinr.gamma_d - gamma_d) / gamma_d;
    return {pt, report};
  }

  constexpr int kGrid = 64;
  std::array<BeamGains, kGrid + 1> ctrl_gains{};
  std::array<BeamGains, kGrid + 1> comm_gains{};
  for (int i = 0; i <= kGrid; ++i) {
    const double s = static_cast<double>(i) / kGrid;
    ctrl_gains[i] = prob.control_beam(s);
    comm_gains[i] = prob.comm_beam(s);
  }
  std::vector<Vertex> grid;
  grid.reserve((kGrid + 1) * (kGrid + 1));
  for (int i = 0; i <= kGrid; ++i) {
    for (int j = 0; j <= kGrid; ++j) {
      grid.push_back({static_cast<double>(i) / kGrid, static_cast<double>(j) / kGrid,
                      prob.comm_sinr(ctrl_gains[i], comm_gains[j])});
    }
  }
  report.iterations = static_cast<int>(grid.size());
  std::partial_sort(grid.begin(), grid.begin() + 3, grid.end(),
                    [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
  if (!(grid.front().value >= 0.0)) {
    throw SolverFailure("pareto_point: no feasible beam direction found", gamma_d);
  }
  Vertex best = grid.front();
  for (int k = 0; k < 3; ++k) {
    if (!(grid[k].value >= 0.0)) continue;
    const Vertex local = nelder_mead(prob, grid[k], 1.0 / kGrid, report.iterations);
    if (local.value > best.value) best = local;
  }

  const BeamGains ctrl = prob.control_beam(best.s_u);
  const BeamGains comm = prob.comm_beam(best.s_d);
  const double f_u = std::max(0.0, prob.comm_fraction(ctrl, comm));
  const double p_u = f_u * cfg.p_dn;
  const double p_d = cfg.p_dn - p_u;
  Beamformer bf;
  bf.power_budget = cfg.p_dn;
  bf.w_d = regularized_unit(ch.h_d, ch.h_u, best.s_u);
  bf.w_u = regularized_unit(ch.h_u, ch.h_d, best.s_d);
  for (auto& e : bf.w_d) e *= std::sqrt(p_d);
  for (auto& e : bf.w_u) e *= std::sqrt(p_u);

  const DownlinkSinrs sinr = downlink_sinrs(ch, bf, s2);
  report.gamma_u_star = sinr.gamma_u;
  report.power_slack = std::fabs(norm_sq(bf.w_d) + norm_sq(bf.w_u) - cfg.p_dn) / cfg.p_dn;
  report.sinr_slack = std::fabs(sinr.gamma_d - gamma_d) / gamma_d;
  report.mu_u = weight_from_s(best.s_u, ch.g_u);
  report.mu_d = weight_from_s(best.s_d, ch.g_d);
  if (std::isfinite(report.mu_u) && report.mu_u > 0.0) {
    const double leak_u = std::norm(inner(ch.h_u, bf.w_d)) + s2;
    report.nu = sinr.gamma_u / (report.mu_u * leak_u);
    if (std::isfinite(report.mu_d)) {
      const double leak_d = std::norm(inner(ch.h_d, bf.w_u)) + s2;
      report.lambda = report.mu_d * *report.nu * leak_d / gamma_d;
    }
  }
  if (report.power_slack > 1e-8 || report.sinr_slack > 1e-8) {
    throw SolverFailure("pareto_point: KKT equality residuals above 1e-8",
                        std::max(report.power_slack, report.sinr_slack));
  }

  pt.power = {p_d, p_u};
  pt.tau_u = comm_delay(std::max(0.0, sinr.gamma_u), cfg);
  pt.beams = std::move(bf);
  return {pt, report};
}

std::vector<SweepEntry> sweep_boundary(Scheme scheme, const std::vector<double>& gamma_grid,
                                       const SystemConfig& cfg, const ChannelPair& ch,
                                       double s_alpha) {
  if (scheme != Scheme::pareto && scheme != Scheme::mrt && scheme != Scheme::zf) {
    throw DomainError("sweep_boundary: only pareto, mrt and zf schemes are swept");
  }
  std::vector<SweepEntry> out(gamma_grid.size());
  const auto n = static_cast<std::ptrdiff_t>(gamma_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    SweepEntry& e = out[static_cast<std::size_t>(i)];
    e.gamma_d = gamma_grid[static_cast<std::size_t>(i)];
    try {
      switch (scheme) {
        case Scheme::pareto: e.point = pareto_point(e.gamma_d, cfg, ch, s_alpha).first; break;
        case Scheme::mrt: e.point = mrt_region_point(e.gamma_d, cfg, ch, s_alpha); break;
        default: e.point = zf_region_point(e.gamma_d, cfg, ch, s_alpha); break;
      }
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  }
  return out;
}

std::vector<double> sinr_grid(double gamma_min, double gamma_max, int n) {
  if (n < 1) throw DomainError("sinr_grid: n must be >= 1");
  if (!(gamma_min > -1.0) || !(gamma_max > gamma_min)) {
    throw DomainError("sinr_grid: requires -1 < gamma_min < gamma_max");
  }
  const double lo = std::log1p(gamma_min);
  const double hi = std::log1p(gamma_max);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    out[static_cast<std::size_t>(i - 1)] = std::expm1(lo + (hi - lo) * i / n);
  }
  out.back() = gamma_max;
  return out;
}

std::optional<double> mrt_zf_crossover_power(double gamma_d, const ChannelPair& ch, double sigma_dn2) {
  if (!(gamma_d > 0.0)) throw DomainError("crossover: gamma_d must be positive");
  const double rho = ch.rho;
  if (rho == 0.0) return std::nullopt;
  const double gd = ch.g_d;
  const double gu = ch.g_u;
  const double s2 = sigma_dn2;
  const double c2 = gamma_d * rho * rho * (1.0 - rho) * gd * gd * gu;
  const double c1 = s2 * gd * rho *
                    (gamma_d * gu * (1.0 - rho - gamma_d * rho) + gd * (gamma_d - gamma_d * rho - 1.0));
  const double c0 = -gamma_d * gamma_d * s2 * s2 * rho * (gd + gu);
  if (!(c2 > 0.0)) throw DegenerateGeometry("crossover: leading coefficient vanishes");
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  // c0 < 0 < c2, so exactly one root is positive; pick it without cancellation.
  const double sq = std::sqrt(disc);
  if (c1 <= 0.0) return (-c1 + sq) / (2.0 * c2);
  return (2.0 * c0) / (-c1 - sq);
}

}  // namespace jdcc
