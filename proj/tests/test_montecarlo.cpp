// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "jdcc/errors.hpp"
#include "jdcc/montecarlo.hpp"
#include "jdcc/oracles.hpp"
#include "jdcc/scenario.hpp"

using namespace jdcc;

namespace {

SystemConfig config(double p_dn_dbm = -30.0) {
  SystemConfig cfg = default_scenario().system;
  cfg.p_dn = dbm_to_watts(p_dn_dbm);
  return cfg;
}

ChannelPair average_channel(const SystemConfig& cfg) {
  return synthetic_channel(cfg.antennas, cfg.antennas * cfg.beta_d(), cfg.antennas * cfg.beta_u(), 0.5);
}

}  // namespace

TEST_CASE("noise-free loop with perfect links is reset in one step") {
  Plant p;
  p.sigma_w2 = 0.0;
  const ClosedLoopResult r = simulate_closed_loop(p, {1e300, 1e300}, 3, 1000, 1, 1.0);
  CHECK(r.mean[0] == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t n = 1; n < r.mean.size(); ++n) CHECK(r.mean[n] < 1e-200);
  CHECK(r.diverged == 0);
}

TEST_CASE("simulated variance tracks the recursion") {
  const SystemConfig cfg = config();
  const ChannelPair ch = average_channel(cfg);
  const Beamformer bf = mrt_beamformer(ch, cfg.p_dn, 0.0, cfg.p_dn);
  const ClosedLoopResult r = simulate_closed_loop(cfg, ch, bf, 50, 10000, 42, 1.0);
  REQUIRE(r.mean.size() == 51);
  CHECK(r.diverged == 0);
  for (std::size_t n = 0; n < r.mean.size(); ++n) {
    CHECK(std::fabs(r.mean[n] - r.analytic[n]) <= 4.0 * r.std_error[n]);
    CHECK(r.active[n] == 10000);
  }
  CHECK(r.terminal.value == r.mean.back());
}

TEST_CASE("fast plant blows up at -30 dBm") {
  SystemConfig cfg = config();
  cfg.plant.a = {5.0, 6.0};
  const ChannelPair ch = average_channel(cfg);
  const Beamformer bf = mrt_beamformer(ch, cfg.p_dn, 0.0, cfg.p_dn);
  const ClosedLoopResult r = simulate_closed_loop(cfg, ch, bf, 20, 5000, 3, 1.0);
  for (std::size_t n = 1; n < r.mean.size(); ++n) CHECK(r.mean[n] > r.mean[n - 1]);
  CHECK(r.mean.back() > 1e3 * cfg.plant.sigma_w2);
}

TEST_CASE("divergence guard stops runaway trials") {
  Plant p;
  p.a = {30.0, 0.0};
  const ClosedLoopResult r = simulate_closed_loop(p, {1.0, 1.0}, 20, 200, 5, 1.0);
  CHECK(r.diverged == 200);
  CHECK(r.active.back() == 0);
  CHECK(std::isnan(r.mean.back()));
}

TEST_CASE("argument checks") {
  Plant p;
  CHECK_THROWS_AS(simulate_closed_loop(p, {10.0, 10.0}, 0, 10, 1, 1.0), DomainError);
  CHECK_THROWS_AS(simulate_closed_loop(p, {10.0, 10.0}, 5, 0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(simulate_closed_loop(p, {10.0, 10.0}, 5, 10, 1, -1.0), DomainError);
  CHECK_THROWS_AS(estimate_joint_outage(Scheme::pareto, {1e-2, 0.03}, config(), 10, 1), DomainError);
}

TEST_CASE("single-function estimators") {
  const SystemConfig cfg = config();
  CHECK(estimate_comm_outage({1e-6, 0.03}, cfg, 1000, 1).value == 1.0);
  const OutageSpec spec{1e-2, 0.03};
  const McEstimate ctrl = estimate_control_outage(spec, cfg, 1'000'000, 9);
  CHECK(std::fabs(ctrl.value - control_only_outage(spec, cfg)) <= 3.0 * ctrl.std_error);
  CHECK(ctrl.trials == 1'000'000);
  CHECK(ctrl.seed == 9);
}

TEST_CASE("serial and threaded estimates are bit-identical") {
  const SystemConfig cfg = config();
  const OutageSpec spec{1e-2, 0.03};
  const OutageEstimates serial = estimate_outages(spec, cfg, 30000, 17, Execution::serial);
  for (int threads : {1, 3, 4}) {
    omp_set_num_threads(threads);
    const OutageEstimates par = estimate_outages(spec, cfg, 30000, 17, Execution::parallel);
    CHECK(par.comm.value == serial.comm.value);
    CHECK(par.control.value == serial.control.value);
    CHECK(par.joint_mrt.value == serial.joint_mrt.value);
    CHECK(par.joint_zf.value == serial.joint_zf.value);
    const ClosedLoopResult a = simulate_closed_loop(cfg.plant, {10.0, 10.0}, 10, 3000, 17, 1.0, Execution::serial);
    const ClosedLoopResult b = simulate_closed_loop(cfg.plant, {10.0, 10.0}, 10, 3000, 17, 1.0, Execution::parallel);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }
  CHECK(estimate_outages(spec, cfg, 30000, 17).comm.value == estimate_comm_outage(spec, cfg, 30000, 17).value);
  CHECK(estimate_outages(spec, cfg, 30000, 17).joint_zf.value ==
        estimate_joint_outage(Scheme::zf, spec, cfg, 30000, 17).value);
  CHECK(estimate_outages(spec, cfg, 30000, 18).comm.value != serial.comm.value);
}

TEST_CASE("joint outage reduces to control outage without a delay requirement") {
  const SystemConfig cfg = config(-25.0);
  const OutageSpec spec{1e6, 0.03};
  const OutageEstimates e = estimate_outages(spec, cfg, 200000, 21);
  CHECK(std::fabs(e.joint_mrt.value - e.control.value) <= 3.0 * e.control.std_error);
  // The ZF control beam only keeps the (1 - rho) share of the CD gain, so
  // ZF stays strictly above the control-only outage.
  CHECK(e.joint_zf.value > e.control.value + 3.0 * e.control.std_error);
}

TEST_CASE("per-draw joint feasibility agrees with a power grid search") {
  const SystemConfig cfg = config();
  const OutageSpec spec{3e-2, 6.0 * cfg.plant.sigma_w2};
  const OutageJudge judge(spec, cfg);
  RandomStream rng(2, 0x6772);
  int feasible[2] = {0, 0};
  int disagreements = 0;
  int boundary = 0;
  for (int k = 0; k < 1000; ++k) {
    const ChannelDraw d = draw_channels(cfg, rng);
    const auto gd = judge.required_control_sinr(d);
    for (int s = 0; s < 2; ++s) {
      const Scheme scheme = s == 0 ? Scheme::mrt : Scheme::zf;
      const bool closed = judge.joint_success(scheme, d);
      if (!gd) {
        CHECK_FALSE(closed);
        continue;
      }
      const double gu = judge.required_comm_sinr();
      const bool grid = oracle::joint_feasible_by_grid(scheme, d.ch, cfg, *gd, gu).feasible;
      feasible[s] += closed;
      if (grid == closed) continue;
      // A grid witness is an explicit split, so it must never be missed.
      if (grid) {
        ++disagreements;
        continue;
      }
      // Closed form feasible, grid not: only when the feasible interval is
      // narrower than the grid spacing, i.e. the relaxed problem is feasible.
      const bool relaxed = oracle::joint_feasible_by_grid(scheme, d.ch, cfg, *gd * (1.0 - 1e-3), gu * (1.0 - 1e-3)).feasible;
      if (relaxed) {
        ++boundary;
      } else {
        ++disagreements;
      }
    }
  }
  CHECK(disagreements == 0);
  CHECK(boundary <= 10);
  CHECK(feasible[0] > 100);
  CHECK(feasible[1] > 100);
}

TEST_CASE("binomial estimate") {
  const McEstimate e = binomial_estimate(250, 1000, 4);
  CHECK(e.value == 0.25);
  CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 1000.0)));
  CHECK(binomial_estimate(0, 1000, 4).std_error == 0.0);
}
