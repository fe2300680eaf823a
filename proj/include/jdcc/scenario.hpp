// SPDX-License-Identifier: Apache-2.0
//
// Scenario files: line-oriented `key = value` pairs grouped under
// `[section]` headers (sections may be dotted, e.g. `[outage.joint]`).
// A key may also carry its section inline (`system.antennas = 6`).
// Comments start with `#` or `;`. dB quantities are converted to linear
// units once, here.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jdcc/channel.hpp"

namespace jdcc {

enum class ChannelMode { synthetic, random, explicit_vectors };

struct ChannelSetup {
  ChannelMode mode = ChannelMode::synthetic;
  /// Synthetic gains relative to the mean gain M * beta (1 = average channel).
  double g_d_scale = 1.0;
  double g_u_scale = 1.0;
  double rho = 0.5;
  CVec h_d;  ///< explicit mode only
  CVec h_u;
};

struct TrajectorySettings {
  int steps = 30;
  std::int64_t trials = 10000;
  double v0 = 1.0;
};

struct StabilityMapSettings {
  double db_min = -10.0;
  double db_max = 30.0;
  int points = 41;
};

struct AsymptoticsSettings {
  double db_min = 0.0;
  double db_max = 60.0;
  int points = 61;
  double fixed_db = 10.0;  ///< SNR/SINR of the link held fixed in the one-sided regimes
};

struct CrossoverSettings {
  double p_dbm_min = -45.0;
  double p_dbm_max = -5.0;
  int points = 81;
  double gamma_d = 2.0;
};

struct OutageSingleSettings {
  double p_dbm_min = -40.0;
  double p_dbm_max = -10.0;
  int points = 7;
  std::vector<int> antennas{4, 6};
  double tau_req = 1e-2;
  double v_req_factor = 3.0;  ///< V_req in units of sigma_w2
};

struct OutageJointSettings {
  double tau_min = 5e-3;
  double tau_max = 3e-2;
  int tau_points = 6;
  double v_factor_min = 1.5;
  double v_factor_max = 6.0;
  int v_points = 6;
};

struct ValidateSettings {
  std::int64_t trials = 1'000'000;
};

struct Scenario {
  SystemConfig system;
  std::uint64_t seed = 42;
  std::int64_t trials = 100000;  ///< Monte Carlo trials for experiments
  int grid = 20;                 ///< points per trade-off sweep
  std::string out_dir = ".";
  ChannelSetup channel;
  TrajectorySettings trajectory;
  StabilityMapSettings stability_map;
  AsymptoticsSettings asymptotics;
  CrossoverSettings crossover;
  OutageSingleSettings outage_single;
  OutageJointSettings outage_joint;
  ValidateSettings validate;

  /// Throws InputError naming the offending field.
  void validate_all() const;
};

/// Built-in defaults (M = 4, -30 dBm powers, a = 1.2+1.2i, ...).
Scenario default_scenario();

/// Parses scenario text over the defaults. `origin` labels error messages.
/// Throws InputError with line numbers for syntax errors and unknown keys.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

/// Canonical `key = value` dump of every field (linear units plus the
/// derived quantities); reparsing it yields the same scenario.
std::string echo_scenario(const Scenario& s);

/// FNV-1a hash of echo_scenario (output directory excluded), as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// Channel pair described by the scenario's [channel] section.
ChannelPair make_channel(const Scenario& s);

/// Parses "1.2+1.2i", "-3i", "2", "1e-3-2e-3i".
std::complex<double> parse_complex(const std::string& text);

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double watts_to_dbm(double watts);

}  // namespace jdcc
