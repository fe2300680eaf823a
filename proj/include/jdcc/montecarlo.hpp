// SPDX-License-Identifier: Apache-2.0
//
// Sampling oracles for the closed loop and the outage probabilities.
//
// Every trial owns a counter-based stream keyed by (seed, trial index), and
// reductions run over fixed-size chunks combined in index order, so serial
// and parallel runs return bit-identical results.
#pragma once

#include <cstdint>
#include <vector>

#include "jdcc/channel.hpp"
#include "jdcc/outage.hpp"
#include "jdcc/pareto.hpp"

namespace jdcc {

enum class Execution { serial, parallel };

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

struct ClosedLoopResult {
  std::vector<double> analytic;   ///< V_0 .. V_n from the variance recursion
  std::vector<double> mean;       ///< empirical E|x_n|^2 over trials still running
  std::vector<double> std_error;
  std::vector<std::int64_t> active;  ///< trials not yet stopped by the divergence guard
  std::int64_t diverged = 0;
  McEstimate terminal;
};

// Per trial, x_0 ~ CN(0, v0). Each interval the state is reported through a
// Gaussian test channel with distortion D_up, the command -(a/b) x_hat is
// delivered through a second one with distortion D_dn, and the plant
// advances with fresh process noise. Both distortions are sized from the
// analytic V_n. A trial stops once |x_n|^2 > 1e12 max(sigma_w2, v0).
ClosedLoopResult simulate_closed_loop(const Plant& plant, LinkQuality q, int n_steps,
                                      std::int64_t trials, std::uint64_t seed, double v0,
                                      Execution exec = Execution::parallel);

/// Link qualities from the uplink SNR and the beamformer's control SINR.
ClosedLoopResult simulate_closed_loop(const SystemConfig& cfg, const ChannelPair& ch,
                                      const Beamformer& bf, int n_steps, std::int64_t trials,
                                      std::uint64_t seed, double v0,
                                      Execution exec = Execution::parallel);

/// One fading realisation with gains normalised by their path loss.
struct ChannelDraw {
  ChannelPair ch;
  double x = 0.0;  ///< ||h_D||^2 / beta_D
  double y = 0.0;  ///< ||h_U||^2 / beta_U
};

ChannelDraw draw_channels(const SystemConfig& cfg, RandomStream& rng);

// Per-draw success tests. They work from physical quantities (SINRs,
// steady-state variance, power splits) rather than the normalised
// thresholds used by the analytic module.
class OutageJudge {
 public:
  OutageJudge(const OutageSpec& spec, const SystemConfig& cfg);

  bool comm_success(const ChannelDraw& d) const;
  /// Steady-state variance with full-power control beam is at most v_req.
  bool control_success(const ChannelDraw& d) const;
  /// A power split meets both requirements; `scheme` is mrt or zf.
  bool joint_success(Scheme scheme, const ChannelDraw& d) const;

  /// Control SINR required at this draw; empty if no SINR suffices.
  std::optional<double> required_control_sinr(const ChannelDraw& d) const;
  double required_comm_sinr() const noexcept { return gamma_u_req_; }

 private:
  SystemConfig cfg_;
  OutageSpec spec_;
  double gamma_u_req_;
  double sigma_dn2_;
};

McEstimate estimate_comm_outage(const OutageSpec& spec, const SystemConfig& cfg,
                                std::int64_t trials, std::uint64_t seed,
                                Execution exec = Execution::parallel);
McEstimate estimate_control_outage(const OutageSpec& spec, const SystemConfig& cfg,
                                   std::int64_t trials, std::uint64_t seed,
                                   Execution exec = Execution::parallel);
/// `scheme` must be mrt or zf.
McEstimate estimate_joint_outage(Scheme scheme, const OutageSpec& spec, const SystemConfig& cfg,
                                 std::int64_t trials, std::uint64_t seed,
                                 Execution exec = Execution::parallel);

struct OutageEstimates {
  McEstimate comm;
  McEstimate control;
  McEstimate joint_mrt;
  McEstimate joint_zf;
};

/// All four estimates from one shared set of draws; each entry equals the
/// corresponding single estimator called with the same seed.
OutageEstimates estimate_outages(const OutageSpec& spec, const SystemConfig& cfg,
                                 std::int64_t trials, std::uint64_t seed,
                                 Execution exec = Execution::parallel);

/// Binomial estimate from a failure count.
McEstimate binomial_estimate(std::int64_t failures, std::int64_t trials, std::uint64_t seed);

}  // namespace jdcc
