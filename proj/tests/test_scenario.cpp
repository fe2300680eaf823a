// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "jdcc/errors.hpp"
#include "jdcc/scenario.hpp"

using namespace jdcc;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "test.ini");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("empty input gives the default parameter set") {
  const Scenario s = parse_scenario("");
  const SystemConfig& c = s.system;
  CHECK(c.antennas == 4);
  CHECK(c.p_dn == doctest::Approx(1e-6).epsilon(1e-14));
  CHECK(c.p_up == doctest::Approx(1e-6).epsilon(1e-14));
  CHECK(c.plant.a == std::complex<double>(1.2, 1.2));
  CHECK(c.plant.b == std::complex<double>(1.0, 0.0));
  CHECK(c.plant.sigma_w2 == 1e-2);
  CHECK(c.b_up == 1e4);
  CHECK(c.b_dn == 2e4);
  CHECK(c.t_s == 1e-4);
  CHECK(c.n0 == doctest::Approx(3.981071705534972e-21).epsilon(1e-14));
  CHECK(c.payload_bits == 1000.0);
  CHECK(c.d_u == 100.0);
  CHECK(c.d_d == 120.0);
  CHECK(c.c0 == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(c.path_loss_exp == 3.2);
  CHECK(c.alpha_up() == doctest::Approx(1.0));
  CHECK(c.alpha_dn() == doctest::Approx(2.0));
  CHECK(echo_scenario(s) == echo_scenario(default_scenario()));
}

TEST_CASE("empty file on disk") {
  const std::string path = "jdcc_empty_scenario.ini";
  { std::ofstream(path) << ""; }
  CHECK(echo_scenario(load_scenario(path)) == echo_scenario(default_scenario()));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_scenario("does/not/exist.ini"), InputError);
}

TEST_CASE("echo lists the derived exponents") {
  const std::string echo = echo_scenario(default_scenario());
  CHECK(contains(echo, "alpha_up = 1"));
  CHECK(contains(echo, "alpha_dn = 2"));
}

TEST_CASE("dB quantities are converted once") {
  const Scenario s = parse_scenario("[system]\np_dn_dbm = -20\nn0_dbm_hz = -170\nc0_db = -40\n");
  CHECK(s.system.p_dn == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK(s.system.n0 == doctest::Approx(1e-20).epsilon(1e-14));
  CHECK(s.system.c0 == doctest::Approx(1e-4).epsilon(1e-14));
  // Echo stores linear values, so re-parsing does not convert again.
  const Scenario again = parse_scenario(echo_scenario(s));
  CHECK(again.system.p_dn == s.system.p_dn);
  CHECK(again.system.n0 == s.system.n0);
}

TEST_CASE("echo round-trips and the hash tracks content") {
  const std::string text =
      "# comment\n[system]\nantennas = 6\n; another comment\n[plant]\na = 2-0.5i\n[outage.joint]\ntau_points = 3\n"
      "[channel]\nmode = explicit\nh_d = 1+0i, 0+1i, 0, 0, 0, 0\nh_u = 0.5, 0.5i, 1, 0, 0, 0\n";
  const Scenario s = parse_scenario(text);
  CHECK(s.system.antennas == 6);
  CHECK(s.system.plant.a == std::complex<double>(2.0, -0.5));
  CHECK(s.outage_joint.tau_points == 3);
  const Scenario back = parse_scenario(echo_scenario(s));
  CHECK(echo_scenario(back) == echo_scenario(s));
  CHECK(scenario_hash(back) == scenario_hash(s));
  CHECK(scenario_hash(s) != scenario_hash(default_scenario()));
  Scenario moved = s;
  moved.out_dir = "/somewhere/else";
  CHECK(scenario_hash(moved) == scenario_hash(s));
}

TEST_CASE("inline dotted keys") {
  const Scenario s = parse_scenario("system.antennas = 8\noutage.single.antennas = 2, 8\nrun.seed = 7\n");
  CHECK(s.system.antennas == 8);
  CHECK(s.outage_single.antennas == std::vector<int>{2, 8});
  CHECK(s.seed == 7);
}

TEST_CASE("invalid input is rejected with a location") {
  CHECK(contains(error_of("[system]\nantennas = 1\n"), "antennas"));
  const std::string unknown = error_of("[system]\n\nbandwidth = 3\n");
  CHECK(contains(unknown, "system.bandwidth"));
  CHECK(contains(unknown, "test.ini:3"));
  CHECK(contains(error_of("[system]\nantennas = four\n"), "test.ini:2"));
  CHECK(contains(error_of("[system\n"), "test.ini:1"));
  CHECK(contains(error_of("just words\n"), "test.ini:1"));
  CHECK_FALSE(error_of("[plant]\nsigma_w2 = -1\n").empty());
  CHECK_FALSE(error_of("[plant]\na = 0.5\n").empty());
  CHECK_FALSE(error_of("[channel]\nmode = magic\n").empty());
  CHECK_FALSE(error_of("[channel]\nrho = 1.5\n").empty());
  CHECK_FALSE(error_of("[channel]\nmode = explicit\nh_d = 1, 0, 0, 0\n").empty());
  CHECK_FALSE(error_of("[run]\ntrials = 0\n").empty());
}

TEST_CASE("complex number syntax") {
  CHECK(parse_complex("1.5") == std::complex<double>(1.5, 0.0));
  CHECK(parse_complex("2i") == std::complex<double>(0.0, 2.0));
  CHECK(parse_complex("-i") == std::complex<double>(0.0, -1.0));
  CHECK(parse_complex(" 1.2+1.2i ") == std::complex<double>(1.2, 1.2));
  CHECK(parse_complex("3e-2-4e-1i") == std::complex<double>(3e-2, -4e-1));
  CHECK(parse_complex("1+2j") == std::complex<double>(1.0, 2.0));
  CHECK_THROWS_AS(parse_complex("1+2k"), InputError);
  CHECK_THROWS_AS(parse_complex(""), InputError);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(db_to_linear(30.0) == doctest::Approx(1000.0).epsilon(1e-15));
  for (double dbm : {-47.3, -30.0, 0.0, 12.5}) CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm));
}

TEST_CASE("channel construction") {
  SUBCASE("synthetic") {
    Scenario s = default_scenario();
    s.channel.rho = 0.0;
    s.channel.g_u_scale = 2.0;
    const ChannelPair ch = make_channel(s);
    CHECK(ch.rho == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ch.g_d == doctest::Approx(4.0 * s.system.beta_d()).epsilon(1e-14));
    CHECK(ch.g_u == doctest::Approx(8.0 * s.system.beta_u()).epsilon(1e-14));
  }
  SUBCASE("random draws follow the seed") {
    Scenario s = default_scenario();
    s.channel.mode = ChannelMode::random;
    const ChannelPair a = make_channel(s);
    const ChannelPair b = make_channel(s);
    s.seed = 43;
    const ChannelPair c = make_channel(s);
    CHECK(a.h_d == b.h_d);
    CHECK(a.h_d != c.h_d);
  }
  SUBCASE("explicit vectors are used as given") {
    const Scenario s =
        parse_scenario("[channel]\nmode = explicit\nh_d = 1, 0, 0, 0\nh_u = 0.5+0.5i, 0.5-0.5i, 0, 0\n");
    const ChannelPair ch = make_channel(s);
    CHECK(ch.h_d[0] == std::complex<double>(1.0, 0.0));
    CHECK(ch.rho == doctest::Approx(0.5));
  }
}
