// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "jdcc/errors.hpp"
#include "jdcc/experiments.hpp"
#include "jdcc/validate.hpp"

using namespace jdcc;

namespace {

Scenario small() {
  Scenario s = default_scenario();
  s.trials = 5000;
  s.trajectory.trials = 2000;
  s.grid = 8;
  s.outage_single.points = 3;
  s.outage_joint.tau_points = 2;
  s.outage_joint.v_points = 2;
  s.stability_map.points = 6;
  s.asymptotics.points = 5;
  s.crossover.points = 9;
  return s;
}

int column(const CsvTable& t, const std::string& name) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (t.columns[k] == name) return static_cast<int>(k);
  }
  FAIL("missing column " << name);
  return -1;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_optional(std::nullopt) == "inf");
  CHECK(format_optional(2.0) == "2");
}

TEST_CASE("trajectory schema and comment block") {
  const Scenario s = small();
  const auto tables = run_trajectory(s);
  REQUIRE(tables.size() == 1);
  const CsvTable& t = tables[0];
  CHECK(t.columns == std::vector<std::string>{"n", "V_analytic", "V_mc", "V_mc_stderr"});
  CHECK(t.rows.size() == static_cast<std::size_t>(s.trajectory.steps + 1));
  const std::string csv = render_csv(t, s, "trajectory");
  CHECK(csv.rfind("# jdcc trajectory\n", 0) == 0);
  CHECK(csv.find("# version: " + std::string(kVersion)) != std::string::npos);
  CHECK(csv.find("# scenario_hash: " + scenario_hash(s)) != std::string::npos);
  CHECK(csv.find("# seed: 42") != std::string::npos);
  CHECK(csv.find("n,V_analytic,V_mc,V_mc_stderr\n") != std::string::npos);
}

TEST_CASE("every experiment reproduces its bodies") {
  const Scenario s = small();
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const auto a = run_named(name, s);
    const auto b = run_named(name, s);
    REQUIRE(a.size() == b.size());
    REQUIRE_FALSE(a.empty());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].body() == b[k].body());
      CHECK_FALSE(a[k].rows.empty());
      for (const auto& row : a[k].rows) CHECK(row.size() == a[k].columns.size());
    }
  }
  CHECK_THROWS_AS(run_named("plot", s), InputError);
}

TEST_CASE("seed changes the Monte Carlo columns only") {
  Scenario s = small();
  const auto a = run_trajectory(s)[0];
  s.seed = 7;
  const auto b = run_trajectory(s)[0];
  const int va = column(a, "V_analytic");
  const int vm = column(a, "V_mc");
  bool mc_differs = false;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    CHECK(a.rows[r][va] == b.rows[r][va]);
    mc_differs = mc_differs || a.rows[r][vm] != b.rows[r][vm];
  }
  CHECK(mc_differs);
}

TEST_CASE("orthogonal channels give three coincident region curves") {
  Scenario s = small();
  s.channel.rho = 0.0;
  const CsvTable t = run_regions(s)[0];
  const int scheme = column(t, "scheme");
  const int gd = column(t, "gamma_d");
  const int tau = column(t, "tau_u");
  const int v = column(t, "v_inf");
  std::map<std::string, std::map<std::string, std::pair<double, double>>> by_target;
  for (const auto& row : t.rows) {
    if (row[scheme] == "pareto" || row[scheme] == "mrt" || row[scheme] == "zf") {
      by_target[row[gd]][row[scheme]] = {std::stod(row[tau]), std::stod(row[v])};
    }
  }
  REQUIRE(by_target.size() >= 5);
  for (const auto& [g, curves] : by_target) {
    CAPTURE(g);
    REQUIRE(curves.size() == 3);
    const auto ref = curves.at("mrt");
    for (const auto& [name, pt] : curves) {
      if (std::isinf(ref.first)) {
        CHECK(std::isinf(pt.first));
      } else {
        CHECK(pt.first == doctest::Approx(ref.first).epsilon(1e-10));
      }
      CHECK(pt.second == doctest::Approx(ref.second).epsilon(1e-10));
    }
  }
}

TEST_CASE("tables are written into the output directory") {
  Scenario s = small();
  s.out_dir = "jdcc_test_out/nested";
  std::filesystem::remove_all("jdcc_test_out");
  const auto paths = write_tables(run_trajectory(s), s, "trajectory");
  REQUIRE(paths.size() == 1);
  std::ifstream in(paths[0]);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == render_csv(run_trajectory(s)[0], s, "trajectory"));
  std::filesystem::remove_all("jdcc_test_out");
}

TEST_CASE("validation report formatting") {
  const CriterionResult ok{3, "demo", true, "x == y", "err 1e-12", "1e-6", 9.9e-7, 0.5};
  const CriterionResult bad{4, "other", false, "a", "b", "c", -1.0, 0.1};
  CHECK(format_criterion(ok).rfind("PASS [3] demo", 0) == 0);
  const std::string line = format_criterion(bad);
  CHECK(line.rfind("FAIL [4] other", 0) == 0);
  CHECK(line.find("expected a") != std::string::npos);
  CHECK(line.find("tolerance c") != std::string::npos);
  ValidationReport r;
  r.criteria = {ok, bad};
  CHECK_FALSE(r.all_passed());
  CHECK(r.table().rows.size() == 2);
  r.criteria[1].seconds = 99.0;
  CHECK(r.table().body() == ValidationReport{{ok, bad}}.table().body());
}

TEST_CASE("subset validation runs the cheap criteria") {
  const ValidationReport r = run_validation(small(), {1, 3, 4, 9});
  REQUIRE(r.criteria.size() == 4);
  CHECK(r.all_passed());
  CHECK_THROWS_AS(run_validation(small(), {11}), InputError);
}
