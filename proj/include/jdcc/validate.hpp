// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: analytic results checked against independent oracles
// and Monte Carlo estimates. Used by `jdcc validate` and the acceptance
// test binary.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jdcc/experiments.hpp"
#include "jdcc/scenario.hpp"

namespace jdcc {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string expected;
  std::string observed;
  std::string tolerance;
  /// Distance to the tolerance in the criterion's own units; negative on failure.
  double margin = 0.0;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
  /// One row per criterion (runtime excluded so reruns are byte-identical).
  CsvTable table() const;
};

/// Runs every criterion. Progress lines go to `log` if non-null.
ValidationReport run_validation(const Scenario& s, std::ostream* log = nullptr);

/// Runs only the listed criterion ids.
ValidationReport run_validation(const Scenario& s, const std::vector<int>& ids, std::ostream* log = nullptr);

/// "PASS [id] name: observed ... (expected ..., tolerance ..., margin ..., t s)".
std::string format_criterion(const CriterionResult& c);

}  // namespace jdcc
