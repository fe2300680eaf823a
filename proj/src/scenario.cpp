// SPDX-License-Identifier: Apache-2.0
#include "jdcc/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "jdcc/errors.hpp"

namespace jdcc {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + t + "'");
  }
  if (used != t.size()) throw InputError("not a number: '" + t + "'");
  return v;
}

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  const double v = parse_double(t);
  if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 9e15) {
    throw InputError("not an integer: '" + t + "'");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_complex(std::complex<double> z) {
  std::string s = fmt(z.real());
  const std::string im = fmt(z.imag());
  s += (im[0] == '-') ? im : "+" + im;
  return s + "i";
}

std::string channel_mode_name(ChannelMode m) {
  switch (m) {
    case ChannelMode::synthetic: return "synthetic";
    case ChannelMode::random: return "random";
    case ChannelMode::explicit_vectors: return "explicit";
  }
  return "synthetic";
}

using Setter = std::function<void(Scenario&, const std::string&)>;

template <typename T>
Setter real_field(T Scenario::*section, double T::*field) {
  return [=](Scenario& s, const std::string& v) { (s.*section).*field = parse_double(v); };
}

template <typename T>
Setter int_field(T Scenario::*section, int T::*field) {
  return [=](Scenario& s, const std::string& v) { (s.*section).*field = static_cast<int>(parse_int(v)); };
}

CVec parse_vector(const std::string& text) {
  CVec out;
  for (const auto& item : split_list(text)) out.push_back(parse_complex(item));
  return out;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    using S = Scenario;
    t["system.antennas"] = [](S& s, const std::string& v) { s.system.antennas = static_cast<int>(parse_int(v)); };
    t["system.p_dn"] = [](S& s, const std::string& v) { s.system.p_dn = parse_double(v); };
    t["system.p_up"] = [](S& s, const std::string& v) { s.system.p_up = parse_double(v); };
    t["system.p_dn_dbm"] = [](S& s, const std::string& v) { s.system.p_dn = dbm_to_watts(parse_double(v)); };
    t["system.p_up_dbm"] = [](S& s, const std::string& v) { s.system.p_up = dbm_to_watts(parse_double(v)); };
    t["system.b_dn"] = [](S& s, const std::string& v) { s.system.b_dn = parse_double(v); };
    t["system.b_up"] = [](S& s, const std::string& v) { s.system.b_up = parse_double(v); };
    t["system.t_s"] = [](S& s, const std::string& v) { s.system.t_s = parse_double(v); };
    t["system.n0"] = [](S& s, const std::string& v) { s.system.n0 = parse_double(v); };
    t["system.n0_dbm_hz"] = [](S& s, const std::string& v) { s.system.n0 = dbm_to_watts(parse_double(v)); };
    t["system.payload_bits"] = [](S& s, const std::string& v) { s.system.payload_bits = parse_double(v); };
    t["system.d_u"] = [](S& s, const std::string& v) { s.system.d_u = parse_double(v); };
    t["system.d_d"] = [](S& s, const std::string& v) { s.system.d_d = parse_double(v); };
    t["system.c0"] = [](S& s, const std::string& v) { s.system.c0 = parse_double(v); };
    t["system.c0_db"] = [](S& s, const std::string& v) { s.system.c0 = db_to_linear(parse_double(v)); };
    t["system.path_loss_exp"] = [](S& s, const std::string& v) { s.system.path_loss_exp = parse_double(v); };

    t["plant.a"] = [](S& s, const std::string& v) { s.system.plant.a = parse_complex(v); };
    t["plant.b"] = [](S& s, const std::string& v) { s.system.plant.b = parse_complex(v); };
    t["plant.sigma_w2"] = [](S& s, const std::string& v) { s.system.plant.sigma_w2 = parse_double(v); };

    t["channel.mode"] = [](S& s, const std::string& v) {
      const std::string m = trim(v);
      if (m == "synthetic") s.channel.mode = ChannelMode::synthetic;
      else if (m == "random") s.channel.mode = ChannelMode::random;
      else if (m == "explicit") s.channel.mode = ChannelMode::explicit_vectors;
      else throw InputError("channel.mode must be synthetic, random or explicit (got '" + m + "')");
    };
    t["channel.g_d_scale"] = [](S& s, const std::string& v) { s.channel.g_d_scale = parse_double(v); };
    t["channel.g_u_scale"] = [](S& s, const std::string& v) { s.channel.g_u_scale = parse_double(v); };
    t["channel.rho"] = [](S& s, const std::string& v) { s.channel.rho = parse_double(v); };
    t["channel.h_d"] = [](S& s, const std::string& v) { s.channel.h_d = parse_vector(v); };
    t["channel.h_u"] = [](S& s, const std::string& v) { s.channel.h_u = parse_vector(v); };

    t["run.seed"] = [](S& s, const std::string& v) {
      const std::string x = trim(v);
      try {
        std::size_t used = 0;
        s.seed = std::stoull(x, &used, 0);
        if (used != x.size()) throw InputError("");
      } catch (const std::exception&) {
        throw InputError("run.seed must be an unsigned 64-bit integer (got '" + x + "')");
      }
    };
    t["run.trials"] = [](S& s, const std::string& v) { s.trials = parse_int(v); };
    t["run.grid"] = [](S& s, const std::string& v) { s.grid = static_cast<int>(parse_int(v)); };
    t["run.out"] = [](S& s, const std::string& v) { s.out_dir = trim(v); };

    t["trajectory.steps"] = int_field(&S::trajectory, &TrajectorySettings::steps);
    t["trajectory.trials"] = [](S& s, const std::string& v) { s.trajectory.trials = parse_int(v); };
    t["trajectory.v0"] = real_field(&S::trajectory, &TrajectorySettings::v0);

    t["stability_map.db_min"] = real_field(&S::stability_map, &StabilityMapSettings::db_min);
    t["stability_map.db_max"] = real_field(&S::stability_map, &StabilityMapSettings::db_max);
    t["stability_map.points"] = int_field(&S::stability_map, &StabilityMapSettings::points);

    t["asymptotics.db_min"] = real_field(&S::asymptotics, &AsymptoticsSettings::db_min);
    t["asymptotics.db_max"] = real_field(&S::asymptotics, &AsymptoticsSettings::db_max);
    t["asymptotics.points"] = int_field(&S::asymptotics, &AsymptoticsSettings::points);
    t["asymptotics.fixed_db"] = real_field(&S::asymptotics, &AsymptoticsSettings::fixed_db);

    t["crossover.p_dbm_min"] = real_field(&S::crossover, &CrossoverSettings::p_dbm_min);
    t["crossover.p_dbm_max"] = real_field(&S::crossover, &CrossoverSettings::p_dbm_max);
    t["crossover.points"] = int_field(&S::crossover, &CrossoverSettings::points);
    t["crossover.gamma_d"] = real_field(&S::crossover, &CrossoverSettings::gamma_d);

    t["outage.single.p_dbm_min"] = real_field(&S::outage_single, &OutageSingleSettings::p_dbm_min);
    t["outage.single.p_dbm_max"] = real_field(&S::outage_single, &OutageSingleSettings::p_dbm_max);
    t["outage.single.points"] = int_field(&S::outage_single, &OutageSingleSettings::points);
    t["outage.single.tau_req"] = real_field(&S::outage_single, &OutageSingleSettings::tau_req);
    t["outage.single.v_req_factor"] = real_field(&S::outage_single, &OutageSingleSettings::v_req_factor);
    t["outage.single.antennas"] = [](S& s, const std::string& v) {
      s.outage_single.antennas.clear();
      for (const auto& item : split_list(v)) {
        s.outage_single.antennas.push_back(static_cast<int>(parse_int(item)));
      }
    };

    t["outage.joint.tau_min"] = real_field(&S::outage_joint, &OutageJointSettings::tau_min);
    t["outage.joint.tau_max"] = real_field(&S::outage_joint, &OutageJointSettings::tau_max);
    t["outage.joint.tau_points"] = int_field(&S::outage_joint, &OutageJointSettings::tau_points);
    t["outage.joint.v_factor_min"] = real_field(&S::outage_joint, &OutageJointSettings::v_factor_min);
    t["outage.joint.v_factor_max"] = real_field(&S::outage_joint, &OutageJointSettings::v_factor_max);
    t["outage.joint.v_points"] = int_field(&S::outage_joint, &OutageJointSettings::v_points);

    t["validate.trials"] = [](S& s, const std::string& v) { s.validate.trials = parse_int(v); };
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw InputError(field + ": " + constraint);
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  if (t.empty()) throw InputError("empty complex number");
  const char last = t.back();
  if (last != 'i' && last != 'j') return {parse_double(t), 0.0};
  t.pop_back();
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : t.substr(0, split);
  std::string im = split == std::string::npos ? t : t.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  try {
    return {re.empty() ? 0.0 : parse_double(re), parse_double(im)};
  } catch (const InputError&) {
    throw InputError("not a complex number: '" + text + "'");
  }
}

void Scenario::validate_all() const {
  try {
    system.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  require(trials >= 1, "run.trials", "must be >= 1");
  require(grid >= 1, "run.grid", "must be >= 1");
  require(!out_dir.empty(), "run.out", "must not be empty");
  require(channel.g_d_scale > 0.0, "channel.g_d_scale", "must be positive");
  require(channel.g_u_scale > 0.0, "channel.g_u_scale", "must be positive");
  require(channel.rho >= 0.0 && channel.rho <= 1.0, "channel.rho", "must lie in [0, 1]");
  if (channel.mode == ChannelMode::explicit_vectors) {
    const auto m = static_cast<std::size_t>(system.antennas);
    require(channel.h_d.size() == m, "channel.h_d", "needs exactly system.antennas entries");
    require(channel.h_u.size() == m, "channel.h_u", "needs exactly system.antennas entries");
  }
  require(trajectory.steps >= 1, "trajectory.steps", "must be >= 1");
  require(trajectory.trials >= 1, "trajectory.trials", "must be >= 1");
  require(trajectory.v0 >= 0.0, "trajectory.v0", "must be >= 0");
  require(stability_map.points >= 2, "stability_map.points", "must be >= 2");
  require(stability_map.db_max > stability_map.db_min, "stability_map.db_max", "must exceed db_min");
  require(asymptotics.points >= 2, "asymptotics.points", "must be >= 2");
  require(asymptotics.db_max > asymptotics.db_min, "asymptotics.db_max", "must exceed db_min");
  require(crossover.points >= 2, "crossover.points", "must be >= 2");
  require(crossover.p_dbm_max > crossover.p_dbm_min, "crossover.p_dbm_max", "must exceed p_dbm_min");
  require(crossover.gamma_d > 0.0, "crossover.gamma_d", "must be positive");
  require(outage_single.points >= 1, "outage.single.points", "must be >= 1");
  require(outage_single.p_dbm_max >= outage_single.p_dbm_min, "outage.single.p_dbm_max",
          "must be >= p_dbm_min");
  require(!outage_single.antennas.empty(), "outage.single.antennas", "must list at least one value");
  for (int m : outage_single.antennas) {
    require(m >= 2 && m <= 20, "outage.single.antennas", "entries must lie in [2, 20]");
  }
  require(outage_single.tau_req > 0.0, "outage.single.tau_req", "must be positive");
  require(outage_single.v_req_factor > 1.0, "outage.single.v_req_factor", "must exceed 1");
  require(outage_joint.tau_points >= 1 && outage_joint.v_points >= 1, "outage.joint", "grid sizes must be >= 1");
  require(outage_joint.tau_min > 0.0 && outage_joint.tau_max >= outage_joint.tau_min, "outage.joint.tau_min",
          "requires 0 < tau_min <= tau_max");
  require(outage_joint.v_factor_min > 1.0 && outage_joint.v_factor_max >= outage_joint.v_factor_min,
          "outage.joint.v_factor_min", "requires 1 < v_factor_min <= v_factor_max");
  require(validate.trials >= 1, "validate.trials", "must be >= 1");
  require(system.antennas <= 20, "system.antennas", "must be <= 20");
}

Scenario default_scenario() {
  Scenario s;
  s.system.p_dn = dbm_to_watts(-30.0);
  s.system.p_up = dbm_to_watts(-30.0);
  s.system.n0 = dbm_to_watts(-174.0);
  s.system.c0 = db_to_linear(-30.0);
  return s;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario s = default_scenario();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  const auto& table = setters();
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const std::size_t hash = line.find_first_of("#;");
    std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw InputError(where + "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw InputError(where + "empty section name");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw InputError(where + "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw InputError(where + "missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) throw InputError(where + "unknown key '" + full + "'");
    try {
      it->second(s, value);
    } catch (const InputError& e) {
      throw InputError(where + full + ": " + e.what());
    }
  }
  s.validate_all();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string echo_scenario(const Scenario& s) {
  std::ostringstream o;
  const SystemConfig& c = s.system;
  o << "[system]\n"
    << "antennas = " << c.antennas << "\n"
    << "p_dn = " << fmt(c.p_dn) << "\n"
    << "p_up = " << fmt(c.p_up) << "\n"
    << "b_dn = " << fmt(c.b_dn) << "\n"
    << "b_up = " << fmt(c.b_up) << "\n"
    << "t_s = " << fmt(c.t_s) << "\n"
    << "n0 = " << fmt(c.n0) << "\n"
    << "payload_bits = " << fmt(c.payload_bits) << "\n"
    << "d_u = " << fmt(c.d_u) << "\n"
    << "d_d = " << fmt(c.d_d) << "\n"
    << "c0 = " << fmt(c.c0) << "\n"
    << "path_loss_exp = " << fmt(c.path_loss_exp) << "\n"
    << "# derived: alpha_up = " << fmt(c.alpha_up()) << "\n"
    << "# derived: alpha_dn = " << fmt(c.alpha_dn()) << "\n"
    << "# derived: sigma_up2 = " << fmt(c.sigma_up2()) << "\n"
    << "# derived: sigma_dn2 = " << fmt(c.sigma_dn2()) << "\n"
    << "# derived: beta_u = " << fmt(c.beta_u()) << "\n"
    << "# derived: beta_d = " << fmt(c.beta_d()) << "\n"
    << "[plant]\n"
    << "a = " << fmt_complex(c.plant.a) << "\n"
    << "b = " << fmt_complex(c.plant.b) << "\n"
    << "sigma_w2 = " << fmt(c.plant.sigma_w2) << "\n"
    << "[channel]\n"
    << "mode = " << channel_mode_name(s.channel.mode) << "\n"
    << "g_d_scale = " << fmt(s.channel.g_d_scale) << "\n"
    << "g_u_scale = " << fmt(s.channel.g_u_scale) << "\n"
    << "rho = " << fmt(s.channel.rho) << "\n";
  auto vec = [&](const char* name, const CVec& v) {
    if (v.empty()) return;
    o << name << " = ";
    for (std::size_t k = 0; k < v.size(); ++k) o << (k ? ", " : "") << fmt_complex(v[k]);
    o << "\n";
  };
  vec("h_d", s.channel.h_d);
  vec("h_u", s.channel.h_u);
  o << "[run]\n"
    << "seed = " << s.seed << "\n"
    << "trials = " << s.trials << "\n"
    << "grid = " << s.grid << "\n"
    << "out = " << s.out_dir << "\n"
    << "[trajectory]\n"
    << "steps = " << s.trajectory.steps << "\n"
    << "trials = " << s.trajectory.trials << "\n"
    << "v0 = " << fmt(s.trajectory.v0) << "\n"
    << "[stability_map]\n"
    << "db_min = " << fmt(s.stability_map.db_min) << "\n"
    << "db_max = " << fmt(s.stability_map.db_max) << "\n"
    << "points = " << s.stability_map.points << "\n"
    << "[asymptotics]\n"
    << "db_min = " << fmt(s.asymptotics.db_min) << "\n"
    << "db_max = " << fmt(s.asymptotics.db_max) << "\n"
    << "points = " << s.asymptotics.points << "\n"
    << "fixed_db = " << fmt(s.asymptotics.fixed_db) << "\n"
    << "[crossover]\n"
    << "p_dbm_min = " << fmt(s.crossover.p_dbm_min) << "\n"
    << "p_dbm_max = " << fmt(s.crossover.p_dbm_max) << "\n"
    << "points = " << s.crossover.points << "\n"
    << "gamma_d = " << fmt(s.crossover.gamma_d) << "\n"
    << "[outage.single]\n"
    << "p_dbm_min = " << fmt(s.outage_single.p_dbm_min) << "\n"
    << "p_dbm_max = " << fmt(s.outage_single.p_dbm_max) << "\n"
    << "points = " << s.outage_single.points << "\n"
    << "antennas = ";
  for (std::size_t k = 0; k < s.outage_single.antennas.size(); ++k) {
    o << (k ? ", " : "") << s.outage_single.antennas[k];
  }
  o << "\n"
    << "tau_req = " << fmt(s.outage_single.tau_req) << "\n"
    << "v_req_factor = " << fmt(s.outage_single.v_req_factor) << "\n"
    << "[outage.joint]\n"
    << "tau_min = " << fmt(s.outage_joint.tau_min) << "\n"
    << "tau_max = " << fmt(s.outage_joint.tau_max) << "\n"
    << "tau_points = " << s.outage_joint.tau_points << "\n"
    << "v_factor_min = " << fmt(s.outage_joint.v_factor_min) << "\n"
    << "v_factor_max = " << fmt(s.outage_joint.v_factor_max) << "\n"
    << "v_points = " << s.outage_joint.v_points << "\n"
    << "[validate]\n"
    << "trials = " << s.validate.trials << "\n";
  return o.str();
}

std::string scenario_hash(const Scenario& s) {
  // The output directory does not change results, so it is left out.
  Scenario keyed = s;
  keyed.out_dir = ".";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echo_scenario(keyed)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ChannelPair make_channel(const Scenario& s) {
  const SystemConfig& c = s.system;
  const int m = c.antennas;
  switch (s.channel.mode) {
    case ChannelMode::synthetic:
      return synthetic_channel(m, s.channel.g_d_scale * m * c.beta_d(), s.channel.g_u_scale * m * c.beta_u(),
                               s.channel.rho);
    case ChannelMode::random: {
      RandomStream rng(s.seed, 0x6368616EULL);
      CVec h_d = sample_channel(m, c.beta_d(), rng);
      CVec h_u = sample_channel(m, c.beta_u(), rng);
      return ChannelPair::from_vectors(std::move(h_d), std::move(h_u));
    }
    case ChannelMode::explicit_vectors:
      return ChannelPair::from_vectors(s.channel.h_d, s.channel.h_u);
  }
  throw InputError("channel: unknown mode");
}

}  // namespace jdcc
