// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "jdcc/channel.hpp"
#include "jdcc/control.hpp"
#include "jdcc/errors.hpp"
#include "jdcc/oracles.hpp"
#include "jdcc/rng.hpp"
#include "jdcc/scenario.hpp"

using namespace jdcc;

namespace {

Plant plant(double a_sq, double sigma = 0.01, double b_sq = 1.0) {
  Plant p;
  p.a = {std::sqrt(a_sq / 2.0), std::sqrt(a_sq / 2.0)};
  p.b = {std::sqrt(b_sq), 0.0};
  p.sigma_w2 = sigma;
  return p;
}

// Loop qualities for the average channel of a scenario with full-power MRT.
LinkQuality average_quality(const SystemConfig& cfg) {
  const double m = cfg.antennas;
  const double s_alpha = std::pow(1.0 + cfg.p_up * m * cfg.beta_d() / cfg.sigma_up2(), cfg.alpha_up());
  const double g_alpha = std::pow(1.0 + cfg.p_dn * m * cfg.beta_d() / cfg.sigma_dn2(), cfg.alpha_dn());
  return {s_alpha, g_alpha};
}

}  // namespace

TEST_CASE("plant validation") {
  CHECK_NOTHROW(Plant{}.validate());
  Plant p;
  p.a = {0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = Plant{};
  p.b = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = Plant{};
  p.sigma_w2 = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(Plant{}.a_sq() == doctest::Approx(2.88));
}

TEST_CASE("uplink distortion") {
  CHECK(uplink_distortion(0.7, 1.0) == 0.7);
  CHECK(uplink_distortion(0.7, 1e300) < 1e-299);
  CHECK(uplink_distortion(1.0, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("downlink distortion") {
  const Plant p = plant(2.88);
  CHECK(downlink_distortion(0.4, 0.4, p, 7.0) == 0.0);
  CHECK(downlink_distortion(1.0, 0.1, p, 10.0) == doctest::Approx(0.2592).epsilon(1e-14));
  CHECK(downlink_distortion(1.0, 0.1, p, 1e300) < 1e-290);
  CHECK_THROWS_AS(downlink_distortion(1.0, 1.5, p, 10.0), DomainError);
}

TEST_CASE("variance step") {
  const Plant p = plant(2.88);
  CHECK(variance_step(0.0, p, {10.0, 10.0}) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(variance_step(1.0, p, {10.0, 10.0}) == doctest::Approx(0.5572).epsilon(1e-14));
  CHECK(contraction_factor(p, {10.0, 10.0}) == doctest::Approx(2.88 * 0.19).epsilon(1e-15));
}

TEST_CASE("variance step equals the two-link distortion decomposition") {
  RandomStream rng(8, 1);
  for (int k = 0; k < 200; ++k) {
    const double b_sq = 0.1 + 5.0 * rng.uniform();
    const Plant p = plant(1.0 + 9.0 * rng.uniform(), 0.001 + rng.uniform(), b_sq);
    const LinkQuality q{1.0 + 50.0 * rng.uniform(), 1.0 + 50.0 * rng.uniform()};
    const double v = 10.0 * rng.uniform();
    const double d_up = uplink_distortion(v, q.s_alpha);
    const double d_dn = downlink_distortion(v, d_up, p, q.gamma_alpha);
    const double two_path = p.a_sq() * d_up + p.b_sq() * d_dn + p.sigma_w2;
    CHECK(variance_step(v, p, q) == doctest::Approx(two_path).epsilon(1e-14));
  }
}

TEST_CASE("stability classification") {
  const Plant p = plant(2.88);
  CHECK_FALSE(is_stable(p, {2.88, 1e12}));
  CHECK_FALSE(is_stable(p, {2.0, 1e12}));
  CHECK(is_stable(p, {10.0, 10.0}));
  CHECK_FALSE(is_stable(p, {10.0, 3.6}));
  CHECK(is_stable(p, {10.0, 3.7}));
}

TEST_CASE("steady-state variance") {
  const Plant p = plant(2.88);
  CHECK(*steady_state_variance(p, {1e15, 1e15}) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(*steady_state_variance(p, {10.0, 10.0}) == doctest::Approx(0.0220848).epsilon(1e-6 / 0.0220848));
  CHECK_FALSE(steady_state_variance(p, {10.0, 3.6}).has_value());
  const FixedPointResult fp = iterate_to_fixed_point(1.0, p, {10.0, 10.0});
  CHECK(fp.converged);
  CHECK(fp.value == doctest::Approx(*steady_state_variance(p, {10.0, 10.0})).epsilon(1e-12));
  CHECK_FALSE(iterate_to_fixed_point(1.0, p, {10.0, 3.6}).converged);
}

TEST_CASE("asymptotic regimes") {
  const Plant p = plant(2.88);
  CHECK(asymptotic_variance(AsymptoticRegime::both_high, p) == 0.01);
  CHECK(asymptotic_variance(AsymptoticRegime::uplink_high, p, 10.0) == doctest::Approx(0.1 / 7.12).epsilon(1e-14));
  CHECK(asymptotic_variance(AsymptoticRegime::downlink_high, p, 10.0) ==
        doctest::Approx(0.0140449).epsilon(1e-7 / 0.0140449));
  CHECK(*steady_state_variance(p, {1e12, 10.0}) ==
        doctest::Approx(asymptotic_variance(AsymptoticRegime::uplink_high, p, 10.0)).epsilon(1e-9));
  CHECK_THROWS_AS(asymptotic_variance(AsymptoticRegime::uplink_high, p, 2.0), DomainError);
}

TEST_CASE("control threshold") {
  const Plant p = plant(2.88);
  const ControlThreshold th = control_threshold(0.03, 100.0, p, 2.0);
  CHECK(th.gamma_alpha == doctest::Approx(4.4699).epsilon(1e-4 / 4.4699));
  CHECK(th.sinr == doctest::Approx(1.1142).epsilon(1e-4 / 1.1142));
  CHECK(th.gamma_alpha ==
        doctest::Approx(oracle::threshold_quality_by_bisection(0.03, 100.0, p)).epsilon(1e-10));
  CHECK(*steady_state_variance(p, {100.0, 4.4699}) == doctest::Approx(0.03).epsilon(1e-6 / 0.03));
  const ControlThreshold loose = control_threshold(1e12, 100.0, p, 2.0);
  CHECK(loose.sinr == doctest::Approx(min_stabilizing_sinr(100.0, p, 2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(control_threshold(0.01, 100.0, p, 2.0), InfeasibleTarget);
  // S must exceed |a|^2 V / (V - sigma^2) = 4.32 for V = 0.03.
  CHECK_THROWS_AS(control_threshold(0.03, 4.3, p, 2.0), InfeasibleTarget);
}

TEST_CASE("control threshold matches the bisection oracle over a grid") {
  const Plant p = plant(2.88);
  for (double v : {0.012, 0.02, 0.05, 0.3}) {
    const double s_min = p.a_sq() * v / (v - p.sigma_w2);
    for (double m : {1.05, 2.0, 20.0, 1e4}) {
      const double s_alpha = s_min * m;
      CHECK(control_threshold(v, s_alpha, p, 2.0).gamma_alpha ==
            doctest::Approx(oracle::threshold_quality_by_bisection(v, s_alpha, p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("minimum stabilising SINR") {
  const Plant p = plant(2.88);
  CHECK(min_stabilizing_sinr(1e15, p, 2.0) == doctest::Approx(std::sqrt(2.88) - 1.0).epsilon(1e-12));
  const double g = min_stabilizing_sinr(10.0, p, 2.0);
  CHECK(g == doctest::Approx(std::sqrt(2.88 * 9.0 / 7.12) - 1.0).epsilon(1e-14));
  CHECK(g == doctest::Approx(0.90799).epsilon(1e-5 / 0.908));
  CHECK(min_stabilizing_sinr(10.0, p, 1.0) == doctest::Approx(2.6404).epsilon(1e-4 / 2.64));
  CHECK(is_stable(p, {10.0, std::pow(1.0 + g * (1.0 + 1e-9), 2.0)}));
  CHECK_FALSE(is_stable(p, {10.0, std::pow(1.0 + g * (1.0 - 1e-9), 2.0)}));
  CHECK_THROWS_AS(min_stabilizing_sinr(2.0, p, 2.0), DomainError);
}

TEST_CASE("trajectory contracts geometrically") {
  const Plant p = plant(2.88);
  const LinkQuality q{10.0, 10.0};
  const double c = contraction_factor(p, q);
  const double v_inf = *steady_state_variance(p, q);
  const auto traj = variance_trajectory(5.0, 40, p, q);
  REQUIRE(traj.size() == 41);
  double bound = std::fabs(5.0 - v_inf);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    CHECK(std::fabs(traj[n] - v_inf) <= bound * (1.0 + 1e-12) + 1e-16);
    bound *= c;
  }
}

TEST_CASE("default scenario converges within a few intervals") {
  const SystemConfig cfg = default_scenario().system;
  const LinkQuality q = average_quality(cfg);
  REQUIRE(is_stable(cfg.plant, q));
  const auto traj = variance_trajectory(1.0, 10, cfg.plant, q);
  const double v_inf = *steady_state_variance(cfg.plant, q);
  CHECK(std::fabs(traj[5] - v_inf) < 1e-2 * v_inf);
}

TEST_CASE("fast plant diverges at -30 dBm and converges at 0 dBm") {
  SystemConfig cfg = default_scenario().system;
  cfg.plant.a = {5.0, 6.0};
  const LinkQuality weak = average_quality(cfg);
  CHECK_FALSE(is_stable(cfg.plant, weak));
  const auto up = variance_trajectory(1.0, 20, cfg.plant, weak);
  for (std::size_t n = 1; n < up.size(); ++n) CHECK(up[n] > up[n - 1]);
  cfg.p_dn = cfg.p_up = dbm_to_watts(0.0);
  const LinkQuality strong = average_quality(cfg);
  CHECK(is_stable(cfg.plant, strong));
  const auto down = variance_trajectory(1.0, 200, cfg.plant, strong);
  CHECK(down.back() == doctest::Approx(*steady_state_variance(cfg.plant, strong)).epsilon(1e-9));
}
