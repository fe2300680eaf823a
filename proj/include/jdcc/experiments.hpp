// SPDX-License-Identifier: Apache-2.0
//
// Named experiments behind the CLI subcommands. Each one returns CSV
// tables; writing them to disk is a separate, single-threaded step.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jdcc/scenario.hpp"

namespace jdcc {

inline constexpr const char* kVersion = "1.0.0";

struct CsvTable {
  std::string file;  ///< file name inside the output directory
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  /// Extra `# key: value` lines for the comment block.
  std::vector<std::pair<std::string, std::string>> meta;

  void add_row(std::vector<std::string> row);
  /// Header row plus data rows, without the comment block.
  std::string body() const;
};

/// "%.12g", with "inf"/"-inf" for unbounded values and "nan" for missing ones.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

/// Comment block (subcommand, version, scenario hash, seed, metadata)
/// followed by the body.
std::string render_csv(const CsvTable& table, const Scenario& s, const std::string& subcommand);

/// Writes every table into s.out_dir (created if missing); returns the paths.
std::vector<std::string> write_tables(const std::vector<CsvTable>& tables, const Scenario& s,
                                      const std::string& subcommand);

std::vector<CsvTable> run_trajectory(const Scenario& s);
std::vector<CsvTable> run_stability_map(const Scenario& s);
std::vector<CsvTable> run_asymptotics(const Scenario& s);
std::vector<CsvTable> run_regions(const Scenario& s);
std::vector<CsvTable> run_crossover(const Scenario& s);
std::vector<CsvTable> run_outage_single(const Scenario& s);
std::vector<CsvTable> run_outage_joint(const Scenario& s);

/// Subcommand names accepted by run_named (validate and config excluded).
const std::vector<std::string>& experiment_names();
std::vector<CsvTable> run_named(const std::string& name, const Scenario& s);

}  // namespace jdcc
