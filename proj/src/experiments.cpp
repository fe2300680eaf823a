// SPDX-License-Identifier: Apache-2.0
#include "jdcc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jdcc/errors.hpp"
#include "jdcc/montecarlo.hpp"
#include "jdcc/outage.hpp"
#include "jdcc/pareto.hpp"

namespace jdcc {

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw DomainError("csv: row width does not match header");
  rows.push_back(std::move(row));
}

std::string CsvTable::body() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : "inf";
}

std::string render_csv(const CsvTable& table, const Scenario& s, const std::string& subcommand) {
  std::ostringstream o;
  o << "# jdcc " << subcommand << "\n"
    << "# version: " << kVersion << "\n"
    << "# scenario_hash: " << scenario_hash(s) << "\n"
    << "# seed: " << s.seed << "\n";
  for (const auto& [k, v] : table.meta) o << "# " << k << ": " << v << "\n";
  o << table.body();
  return o.str();
}

std::vector<std::string> write_tables(const std::vector<CsvTable>& tables, const Scenario& s,
                                      const std::string& subcommand) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(s.out_dir, ec);
  if (ec) throw InputError("cannot create output directory '" + s.out_dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (const CsvTable& t : tables) {
    const fs::path p = fs::path(s.out_dir) / t.file;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + p.string() + "'");
    out << render_csv(t, s, subcommand);
    if (!out) throw InputError("write failed for '" + p.string() + "'");
    paths.push_back(p.string());
  }
  return paths;
}

namespace {

std::string num(double v) { return format_number(v); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

double norm_variance(const Variance& v, double sigma_w2) {
  return v ? *v / sigma_w2 : std::numeric_limits<double>::infinity();
}

OutageSpec spec_from(double tau, double factor, const Plant& plant) {
  return {tau, factor * plant.sigma_w2};
}

}  // namespace

std::vector<CsvTable> run_trajectory(const Scenario& s) {
  const SystemConfig& cfg = s.system;
  const ChannelPair ch = make_channel(s);
  const Beamformer bf = mrt_beamformer(ch, cfg.p_dn, 0.0, cfg.p_dn);
  const double s_alpha = uplink_quality(cfg, ch);
  const double gamma_d = downlink_sinrs(ch, bf, cfg.sigma_dn2()).gamma_d;
  const LinkQuality q{s_alpha, std::pow(1.0 + gamma_d, cfg.alpha_dn())};
  const ClosedLoopResult r =
      simulate_closed_loop(cfg, ch, bf, s.trajectory.steps, s.trajectory.trials, s.seed, s.trajectory.v0);

  CsvTable t;
  t.file = "trajectory.csv";
  t.columns = {"n", "V_analytic", "V_mc", "V_mc_stderr"};
  t.meta = {{"beam", "control-only MRT at full downlink power"},
            {"S_alpha", num(q.s_alpha)},
            {"Gamma_alpha", num(q.gamma_alpha)},
            {"stable", is_stable(cfg.plant, q) ? "yes" : "no"},
            {"V_inf", format_optional(steady_state_variance(cfg.plant, q))},
            {"trials", std::to_string(s.trajectory.trials)},
            {"diverged_trials", std::to_string(r.diverged)}};
  for (std::size_t n = 0; n < r.analytic.size(); ++n) {
    t.add_row({std::to_string(n), num(r.analytic[n]), num(r.mean[n]), num(r.std_error[n])});
  }
  return {t};
}

std::vector<CsvTable> run_stability_map(const Scenario& s) {
  const SystemConfig& cfg = s.system;
  const Plant& plant = cfg.plant;
  const auto grid = linspace(s.stability_map.db_min, s.stability_map.db_max, s.stability_map.points);
  CsvTable map;
  map.file = "stability_map.csv";
  map.columns = {"snr_up_db", "sinr_dn_db", "S_alpha", "Gamma_alpha", "stable", "V_inf_over_sigma_w2"};
  map.meta = {{"alpha_up", num(cfg.alpha_up())}, {"alpha_dn", num(cfg.alpha_dn())}};
  for (double up : grid) {
    for (double dn : grid) {
      const LinkQuality q{std::pow(1.0 + db_to_linear(up), cfg.alpha_up()),
                          std::pow(1.0 + db_to_linear(dn), cfg.alpha_dn())};
      map.add_row({num(up), num(dn), num(q.s_alpha), num(q.gamma_alpha), is_stable(plant, q) ? "1" : "0",
                   num(norm_variance(steady_state_variance(plant, q), plant.sigma_w2))});
    }
  }
  CsvTable boundary;
  boundary.file = "stability_boundary.csv";
  boundary.columns = {"snr_up_db", "sinr_dn_min_db"};
  const auto fine = linspace(s.stability_map.db_min, s.stability_map.db_max, 4 * s.stability_map.points - 3);
  for (double up : fine) {
    const double s_alpha = std::pow(1.0 + db_to_linear(up), cfg.alpha_up());
    double edge = std::numeric_limits<double>::infinity();
    if (s_alpha > plant.a_sq()) {
      const double g = min_stabilizing_sinr(s_alpha, plant, cfg.alpha_dn());
      edge = g > 0.0 ? 10.0 * std::log10(g) : -std::numeric_limits<double>::infinity();
    }
    boundary.add_row({num(up), num(edge)});
  }
  return {map, boundary};
}

std::vector<CsvTable> run_asymptotics(const Scenario& s) {
  const SystemConfig& cfg = s.system;
  const Plant& plant = cfg.plant;
  const double sw = plant.sigma_w2;
  const double s_fixed = std::pow(1.0 + db_to_linear(s.asymptotics.fixed_db), cfg.alpha_up());
  const double g_fixed = std::pow(1.0 + db_to_linear(s.asymptotics.fixed_db), cfg.alpha_dn());
  auto limit = [&](AsymptoticRegime r, double finite) {
    if (r != AsymptoticRegime::both_high && !(finite > plant.a_sq())) return std::numeric_limits<double>::infinity();
    return asymptotic_variance(r, plant, finite) / sw;
  };
  CsvTable t;
  t.file = "asymptotics.csv";
  t.columns = {"gamma_db", "both_exact", "both_limit", "uplink_high_exact", "uplink_high_limit",
               "downlink_high_exact", "downlink_high_limit"};
  t.meta = {{"normalisation", "V_inf / sigma_w2"},
            {"fixed_db", num(s.asymptotics.fixed_db)},
            {"uplink_high", "S grows with gamma, downlink SINR held at fixed_db"},
            {"downlink_high", "downlink SINR grows with gamma, uplink SNR held at fixed_db"}};
  for (double db : linspace(s.asymptotics.db_min, s.asymptotics.db_max, s.asymptotics.points)) {
    const double g = db_to_linear(db);
    const double s_var = std::pow(1.0 + g, cfg.alpha_up());
    const double g_var = std::pow(1.0 + g, cfg.alpha_dn());
    t.add_row({num(db), num(norm_variance(steady_state_variance(plant, {s_var, g_var}), sw)),
               num(limit(AsymptoticRegime::both_high, 0.0)),
               num(norm_variance(steady_state_variance(plant, {s_var, g_fixed}), sw)),
               num(limit(AsymptoticRegime::uplink_high, g_fixed)),
               num(norm_variance(steady_state_variance(plant, {s_fixed, g_var}), sw)),
               num(limit(AsymptoticRegime::downlink_high, s_fixed))});
  }
  return {t};
}

std::vector<CsvTable> run_regions(const Scenario& s) {
  const SystemConfig& cfg = s.system;
  const ChannelPair ch = make_channel(s);
  const double s_alpha = uplink_quality(cfg, ch);
  CsvTable t;
  t.file = "regions.csv";
  t.columns = {"scheme", "gamma_d", "tau_u", "v_inf", "p_d", "p_u", "status"};
  t.meta = {{"rho", num(ch.rho)},
            {"g_d", num(ch.g_d)},
            {"g_u", num(ch.g_u)},
            {"S_alpha", num(s_alpha)},
            {"grid", std::to_string(s.grid) + " points, 1+gamma_d log-spaced, lower end excluded"}};
  auto put = [&](const TradeoffPoint& p, const std::string& status) {
    t.add_row({to_string(p.scheme), num(p.gamma_d), format_optional(p.tau_u), format_optional(p.v_inf),
               num(p.power.p_d), num(p.power.p_u), status});
  };
  put(comm_only_point(cfg, ch), "ok");
  if (!(s_alpha > cfg.plant.a_sq())) {
    t.meta.emplace_back("note", "uplink quality cannot stabilise the loop; only the comm-only point exists");
    return {t};
  }
  put(control_only_point(cfg, ch), "ok");
  const double g_min = min_stabilizing_sinr(s_alpha, cfg.plant, cfg.alpha_dn());
  t.meta.emplace_back("gamma_d_min", num(g_min));
  for (Scheme scheme : {Scheme::pareto, Scheme::mrt, Scheme::zf}) {
    const double g_max = gamma_d_max(scheme, cfg, ch);
    if (!(g_max > g_min)) {
      t.add_row({to_string(scheme), "nan", "inf", "inf", "nan", "nan", "empty feasible interval"});
      continue;
    }
    for (const SweepEntry& e : sweep_boundary(scheme, sinr_grid(g_min, g_max, s.grid), cfg, ch, s_alpha)) {
      if (e.point) {
        put(*e.point, "ok");
      } else {
        t.add_row({to_string(scheme), num(e.gamma_d), "inf", "inf", "nan", "nan", "\"" + e.error + "\""});
      }
    }
  }
  return {t};
}

std::vector<CsvTable> run_crossover(const Scenario& s) {
  SystemConfig cfg = s.system;
  const ChannelPair ch = make_channel(s);
  const double gamma_d = s.crossover.gamma_d;
  const double s2 = cfg.sigma_dn2();
  CsvTable t;
  t.file = "crossover.csv";
  t.columns = {"p_dn_dbm", "tau_mrt", "tau_zf", "better"};
  t.meta = {{"gamma_d", num(gamma_d)}, {"rho", num(ch.rho)}, {"g_d", num(ch.g_d)}, {"g_u", num(ch.g_u)},
            {"note", "delay only; loop stability is not imposed"}};
  for (double dbm : linspace(s.crossover.p_dbm_min, s.crossover.p_dbm_max, s.crossover.points)) {
    cfg.p_dn = dbm_to_watts(dbm);
    std::optional<double> tau_mrt;
    std::optional<double> tau_zf;
    bool mrt_ok = false;
    bool zf_ok = false;
    if (gamma_d <= gamma_d_max_mrt(cfg, ch)) {
      const PowerSplit p = mrt_power_allocation(gamma_d, cfg, ch);
      tau_mrt = comm_delay(p.p_u * ch.g_u / (p.p_d * ch.rho * ch.g_u + s2), cfg);
      mrt_ok = true;
    }
    if (ch.rho < 1.0 && gamma_d <= gamma_d_max_zf(cfg, ch)) {
      const PowerSplit p = zf_power_allocation(gamma_d, cfg, ch);
      tau_zf = comm_delay(p.p_u * ch.g_u * (1.0 - ch.rho) / s2, cfg);
      zf_ok = true;
    }
    std::string better = "none";
    if (mrt_ok || zf_ok) {
      const double a = tau_mrt.value_or(std::numeric_limits<double>::infinity());
      const double b = tau_zf.value_or(std::numeric_limits<double>::infinity());
      better = a < b ? "mrt" : (b < a ? "zf" : "tie");
    }
    t.add_row({num(dbm), mrt_ok ? format_optional(tau_mrt) : "inf", zf_ok ? format_optional(tau_zf) : "inf",
               better});
  }
  CsvTable th;
  th.file = "crossover_threshold.csv";
  th.columns = {"gamma_d", "rho", "p_threshold_w", "p_threshold_dbm"};
  std::optional<double> p_th;
  std::string note;
  try {
    p_th = mrt_zf_crossover_power(gamma_d, ch, s2);
  } catch (const DegenerateGeometry& e) {
    note = e.what();
  }
  if (p_th) {
    th.add_row({num(gamma_d), num(ch.rho), num(*p_th), num(watts_to_dbm(*p_th))});
  } else {
    th.add_row({num(gamma_d), num(ch.rho), "nan", "nan"});
    th.meta.emplace_back("note", note.empty() ? "orthogonal channels: MRT and ZF coincide" : note);
  }
  return {t, th};
}

std::vector<CsvTable> run_outage_single(const Scenario& s) {
  const OutageSingleSettings& o = s.outage_single;
  const OutageSpec spec = spec_from(o.tau_req, o.v_req_factor, s.system.plant);
  CsvTable t;
  t.file = "outage_single.csv";
  t.columns = {"antennas", "p_dn_dbm", "comm_analytic", "comm_mc", "comm_mc_stderr",
               "ctrl_analytic", "ctrl_mc", "ctrl_mc_stderr"};
  t.meta = {{"tau_req", num(o.tau_req)},
            {"v_req", num(spec.v_req)},
            {"p_up_dbm", num(watts_to_dbm(s.system.p_up))},
            {"trials", std::to_string(s.trials)}};
  for (int m : o.antennas) {
    for (double dbm : linspace(o.p_dbm_min, o.p_dbm_max, o.points)) {
      SystemConfig cfg = s.system;
      cfg.antennas = m;
      cfg.p_dn = dbm_to_watts(dbm);
      const OutageEstimates e = estimate_outages(spec, cfg, s.trials, s.seed);
      t.add_row({std::to_string(m), num(dbm), num(comm_only_outage(spec, cfg)), num(e.comm.value),
                 num(e.comm.std_error), num(control_only_outage(spec, cfg)), num(e.control.value),
                 num(e.control.std_error)});
    }
  }
  return {t};
}

std::vector<CsvTable> run_outage_joint(const Scenario& s) {
  const OutageJointSettings& o = s.outage_joint;
  const SystemConfig& cfg = s.system;
  CsvTable t;
  t.file = "outage_joint.csv";
  t.columns = {"tau_req", "v_req_factor", "mrt_analytic", "mrt_mc", "mrt_mc_stderr", "zf_analytic",
               "zf_mc", "zf_mc_stderr", "comm_only", "control_only"};
  t.meta = {{"p_dn_dbm", num(watts_to_dbm(cfg.p_dn))},
            {"antennas", std::to_string(cfg.antennas)},
            {"v_req", "v_req_factor * sigma_w2"},
            {"trials", std::to_string(s.trials)}};
  for (double tau : linspace(o.tau_min, o.tau_max, o.tau_points)) {
    for (double vf : linspace(o.v_factor_min, o.v_factor_max, o.v_points)) {
      const OutageSpec spec = spec_from(tau, vf, cfg.plant);
      const OutageEstimates e = estimate_outages(spec, cfg, s.trials, s.seed);
      t.add_row({num(tau), num(vf), num(joint_outage_mrt(spec, cfg).value), num(e.joint_mrt.value),
                 num(e.joint_mrt.std_error), num(joint_outage_zf(spec, cfg).value), num(e.joint_zf.value),
                 num(e.joint_zf.std_error), num(comm_only_outage(spec, cfg)), num(control_only_outage(spec, cfg))});
    }
  }
  return {t};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"trajectory", "stability-map", "asymptotics", "regions",
                                                 "crossover",  "outage-single", "outage-joint"};
  return names;
}

std::vector<CsvTable> run_named(const std::string& name, const Scenario& s) {
  if (name == "trajectory") return run_trajectory(s);
  if (name == "stability-map") return run_stability_map(s);
  if (name == "asymptotics") return run_asymptotics(s);
  if (name == "regions") return run_regions(s);
  if (name == "crossover") return run_crossover(s);
  if (name == "outage-single") return run_outage_single(s);
  if (name == "outage-joint") return run_outage_joint(s);
  throw InputError("unknown experiment '" + name + "'");
}

}  // namespace jdcc
