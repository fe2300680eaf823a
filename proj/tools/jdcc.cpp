// SPDX-License-Identifier: Apache-2.0
//
// jdcc: experiment harness.
//
//   jdcc <subcommand> [--config PATH] [--seed U64] [--out DIR] [--trials N] [--grid N]
//
// Values come from the built-in defaults, then the scenario file, then the
// flags (later wins). --trials sets every Monte Carlo trial count.
//
// Exit codes: 0 ok, 1 validation failure, 2 input error, 3 numeric failure.
// Failures print one JSON object on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "jdcc/errors.hpp"
#include "jdcc/experiments.hpp"
#include "jdcc/scenario.hpp"
#include "jdcc/validate.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int report_error(const std::string& kind, const std::string& message, int code,
                 const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
  j.update(extra);
  std::cerr << j.dump() << "\n";
  return code;
}

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::int64_t> trials;
  std::optional<int> grid;
};

jdcc::Scenario resolve(const Overrides& o) {
  jdcc::Scenario s = o.config.empty() ? jdcc::default_scenario() : jdcc::load_scenario(o.config);
  if (o.seed) s.seed = *o.seed;
  if (o.out) s.out_dir = *o.out;
  if (o.trials) {
    s.trials = *o.trials;
    s.trajectory.trials = *o.trials;
    s.validate.trials = *o.trials;
  }
  if (o.grid) s.grid = *o.grid;
  s.validate_all();
  return s;
}

int run_experiment(const std::string& name, const jdcc::Scenario& s) {
  const auto tables = jdcc::run_named(name, s);
  for (const auto& path : jdcc::write_tables(tables, s, name)) std::cout << path << "\n";
  return 0;
}

int run_validate(const jdcc::Scenario& s, const std::vector<int>& only) {
  const jdcc::ValidationReport report =
      only.empty() ? jdcc::run_validation(s, &std::cout) : jdcc::run_validation(s, only, &std::cout);
  for (const auto& path : jdcc::write_tables({report.table()}, s, "validate")) std::cout << path << "\n";
  if (report.all_passed()) {
    std::cout << "all " << report.criteria.size() << " criteria passed\n";
    return 0;
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& c : report.criteria) {
    if (!c.passed) {
      failed.push_back({{"id", c.id}, {"name", c.name}, {"expected", c.expected}, {"observed", c.observed},
                        {"tolerance", c.tolerance}});
    }
  }
  return report_error("ValidationFailure", "acceptance criteria failed", kExitValidation, {{"failed", failed}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint communication and control analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", jdcc::kVersion);

  Overrides o;
  app.add_option("--config", o.config, "Scenario file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Root seed for all random streams");
  app.add_option("--out", o.out, "Output directory for CSV files");
  app.add_option("--trials", o.trials, "Monte Carlo trials (all experiments)")->check(CLI::PositiveNumber);
  app.add_option("--grid", o.grid, "Points per trade-off sweep")->check(CLI::PositiveNumber);

  std::vector<CLI::App*> experiments;
  for (const auto& name : jdcc::experiment_names()) experiments.push_back(app.add_subcommand(name));
  experiments[0]->description("Analytic and simulated state variance over time");
  experiments[1]->description("Steady-state variance over an SNR x SINR grid");
  experiments[2]->description("Variance limits when one or both links become perfect");
  experiments[3]->description("Pareto, MRT and ZF delay / variance trade-off");
  experiments[4]->description("MRT vs ZF delay over downlink power");
  experiments[5]->description("Single-function outage over downlink power");
  experiments[6]->description("Joint outage over (tau_req, V_req)");
  std::vector<int> only;
  CLI::App* validate = app.add_subcommand("validate", "Acceptance suite (analytic vs oracles)");
  validate->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, 10));
  CLI::App* config = app.add_subcommand("config", "Print the resolved scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InputError", e.what(), kExitInput);
  }

  try {
    const jdcc::Scenario s = resolve(o);
    if (config->parsed()) {
      std::cout << jdcc::echo_scenario(s);
      return 0;
    }
    if (validate->parsed()) return run_validate(s, only);
    for (CLI::App* sub : experiments) {
      if (sub->parsed()) return run_experiment(sub->get_name(), s);
    }
    return report_error("InputError", "no subcommand", kExitInput);
  } catch (const jdcc::InputError& e) {
    return report_error("InputError", e.what(), kExitInput);
  } catch (const jdcc::DomainError& e) {
    return report_error("DomainError", e.what(), kExitInput);
  } catch (const jdcc::InfeasibleTarget& e) {
    return report_error("InfeasibleTarget", e.what(), kExitInput);
  } catch (const jdcc::SolverFailure& e) {
    return report_error("SolverFailure", e.what(), kExitNumeric, {{"residual", e.residual()}});
  } catch (const jdcc::QuadratureFailure& e) {
    return report_error("QuadratureFailure", e.what(), kExitNumeric, {{"error_estimate", e.error_estimate()}});
  } catch (const jdcc::DegenerateGeometry& e) {
    return report_error("DegenerateGeometry", e.what(), kExitNumeric);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), kExitNumeric);
  }
}
