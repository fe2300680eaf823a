// SPDX-License-Identifier: Apache-2.0
#include "jdcc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jdcc/errors.hpp"
#include "jdcc/numeric.hpp"

namespace jdcc {

namespace {

constexpr std::int64_t kChunk = 1024;
constexpr double kDivergence = 1e12;

// Distinct stream families so estimators never share draws by accident.
constexpr std::uint64_t kLoopSalt = 0x6C6F6F70ULL;
constexpr std::uint64_t kOutageSalt = 0x6F757467ULL;

struct StepSums {
  std::vector<CompensatedSum> sq;
  std::vector<CompensatedSum> quad;
  std::vector<std::int64_t> count;
  std::int64_t diverged = 0;

  explicit StepSums(std::size_t n) : sq(n), quad(n), count(n, 0) {}
};

// Test channel x_hat = (1 - D/V) x + z, z ~ CN(0, (1 - D/V) D): the
// reconstruction error has variance D and is orthogonal to x_hat.
cdouble reconstruct(cdouble x, double v, double d, RandomStream& rng) {
  if (!(v > 0.0)) return {0.0, 0.0};
  const double keep = std::max(0.0, 1.0 - d / v);
  return keep * x + rng.complex_normal(keep * d);
}

void run_trial(const Plant& plant, LinkQuality q, const std::vector<double>& v, double v0,
               std::uint64_t seed, std::int64_t trial, StepSums& sums) {
  RandomStream rng(seed ^ kLoopSalt, static_cast<std::uint64_t>(trial));
  const cdouble a = plant.a;
  const cdouble b = plant.b;
  const double a2 = plant.a_sq();
  const double b2 = plant.b_sq();
  const double limit = kDivergence * std::max(plant.sigma_w2, v0);
  cdouble x = rng.complex_normal(v0);
  const std::size_t n_steps = v.size() - 1;
  for (std::size_t n = 0;; ++n) {
    const double e = std::norm(x);
    sums.sq[n].add(e);
    sums.quad[n].add(e * e);
    ++sums.count[n];
    if (n == n_steps) break;
    if (e > limit) {
      ++sums.diverged;
      break;
    }
    const double d_up = uplink_distortion(v[n], q.s_alpha);
    const cdouble x_hat = reconstruct(x, v[n], d_up, rng);
    const double v_cmd = a2 / b2 * (v[n] - d_up);
    const double d_dn = downlink_distortion(v[n], d_up, plant, q.gamma_alpha);
    const cdouble cmd = -(a / b) * x_hat;
    const cdouble cmd_hat = reconstruct(cmd, v_cmd, d_dn, rng);
    x = a * x + b * cmd_hat + rng.complex_normal(plant.sigma_w2);
  }
}

}  // namespace

ClosedLoopResult simulate_closed_loop(const Plant& plant, LinkQuality q, int n_steps,
                                      std::int64_t trials, std::uint64_t seed, double v0,
                                      Execution exec) {
  // Noise-free plants are allowed here (the analytic steady state is not needed).
  if (!(std::abs(plant.a) > 1.0) || plant.b == cdouble{0.0, 0.0} || !(plant.sigma_w2 >= 0.0)) {
    throw DomainError("simulate_closed_loop: requires |a| > 1, b != 0 and sigma_w2 >= 0");
  }
  if (n_steps < 1) throw DomainError("simulate_closed_loop: n_steps must be >= 1");
  if (trials < 1) throw DomainError("simulate_closed_loop: trials must be >= 1");
  if (!(v0 >= 0.0)) throw DomainError("simulate_closed_loop: negative initial variance");

  ClosedLoopResult out;
  out.analytic = variance_trajectory(v0, n_steps, plant, q);
  const std::size_t len = out.analytic.size();
  const std::int64_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<StepSums> chunks(static_cast<std::size_t>(n_chunks), StepSums(len));

  auto run_chunk = [&](std::int64_t c) {
    StepSums& s = chunks[static_cast<std::size_t>(c)];
    const std::int64_t end = std::min(trials, (c + 1) * kChunk);
    for (std::int64_t t = c * kChunk; t < end; ++t) run_trial(plant, q, out.analytic, v0, seed, t, s);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }

  out.mean.assign(len, 0.0);
  out.std_error.assign(len, 0.0);
  out.active.assign(len, 0);
  for (std::size_t n = 0; n < len; ++n) {
    CompensatedSum sq;
    CompensatedSum quad;
    std::int64_t count = 0;
    for (const StepSums& s : chunks) {
      sq.add(s.sq[n].value());
      quad.add(s.quad[n].value());
      count += s.count[n];
    }
    out.active[n] = count;
    if (count == 0) {
      out.mean[n] = std::numeric_limits<double>::quiet_NaN();
      out.std_error[n] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double mean = sq.value() / static_cast<double>(count);
    const double second = quad.value() / static_cast<double>(count);
    const double var = std::max(0.0, second - mean * mean);
    out.mean[n] = mean;
    out.std_error[n] = count > 1 ? std::sqrt(var / static_cast<double>(count - 1)) : 0.0;
  }
  for (const StepSums& s : chunks) out.diverged += s.diverged;
  out.terminal = {out.mean.back(), out.std_error.back(), out.active.back(), seed};
  return out;
}

ClosedLoopResult simulate_closed_loop(const SystemConfig& cfg, const ChannelPair& ch,
                                      const Beamformer& bf, int n_steps, std::int64_t trials,
                                      std::uint64_t seed, double v0, Execution exec) {
  const double s_alpha = uplink_quality(cfg, ch);
  const double gamma_d = downlink_sinrs(ch, bf, cfg.sigma_dn2()).gamma_d;
  const LinkQuality q{s_alpha, std::pow(1.0 + gamma_d, cfg.alpha_dn())};
  return simulate_closed_loop(cfg.plant, q, n_steps, trials, seed, v0, exec);
}

ChannelDraw draw_channels(const SystemConfig& cfg, RandomStream& rng) {
  const double beta_d = cfg.beta_d();
  const double beta_u = cfg.beta_u();
  ChannelDraw d;
  d.ch = ChannelPair::from_vectors(sample_channel(cfg.antennas, beta_d, rng),
                                   sample_channel(cfg.antennas, beta_u, rng));
  d.x = d.ch.g_d / beta_d;
  d.y = d.ch.g_u / beta_u;
  return d;
}

OutageJudge::OutageJudge(const OutageSpec& spec, const SystemConfig& cfg)
    : cfg_(cfg),
      spec_(spec),
      gamma_u_req_(std::exp2(cfg.payload_bits / (cfg.b_dn * spec.tau_req)) - 1.0),
      sigma_dn2_(cfg.sigma_dn2()) {
  cfg.validate();
  spec.validate(cfg.plant);
}

bool OutageJudge::comm_success(const ChannelDraw& d) const {
  const double gamma_u = cfg_.p_dn * d.ch.g_u / sigma_dn2_;
  return comm_delay(gamma_u, cfg_).value_or(std::numeric_limits<double>::infinity()) <= spec_.tau_req;
}

bool OutageJudge::control_success(const ChannelDraw& d) const {
  const double s_alpha = uplink_quality(cfg_, d.ch);
  const double gamma_d = cfg_.p_dn * d.ch.g_d / sigma_dn2_;
  const Variance v = steady_state_variance(cfg_.plant, {s_alpha, std::pow(1.0 + gamma_d, cfg_.alpha_dn())});
  return v && *v <= spec_.v_req;
}

std::optional<double> OutageJudge::required_control_sinr(const ChannelDraw& d) const {
  const double s_alpha = uplink_quality(cfg_, d.ch);
  const double a2 = cfg_.plant.a_sq();
  if (!(s_alpha * (spec_.v_req - cfg_.plant.sigma_w2) > a2 * spec_.v_req)) return std::nullopt;
  return control_threshold(spec_.v_req, s_alpha, cfg_.plant, cfg_.alpha_dn()).sinr;
}

bool OutageJudge::joint_success(Scheme scheme, const ChannelDraw& d) const {
  const std::optional<double> req = required_control_sinr(d);
  if (!req) return false;
  const double gd = *req;
  const double gu = gamma_u_req_;
  const double p = cfg_.p_dn;
  const double s2 = sigma_dn2_;
  const ChannelPair& ch = d.ch;
  if (!(ch.g_d > 0.0) || !(ch.g_u > 0.0)) return false;
  if (scheme == Scheme::mrt) {
    // Control SINR rises and CU SINR falls with p_D; both hold on [p_min, p_max].
    const double p_min = gd * (p * ch.rho * ch.g_d + s2) / (ch.g_d * (1.0 + gd * ch.rho));
    const double p_max = (p * ch.g_u - gu * s2) / (ch.g_u * (1.0 + gu * ch.rho));
    return p_min <= p_max;
  }
  if (scheme == Scheme::zf) {
    if (!(ch.rho < 1.0)) return false;
    const double need = (gd * s2 / ch.g_d + gu * s2 / ch.g_u) / (1.0 - ch.rho);
    return need <= p;
  }
  throw DomainError("joint_success: scheme must be mrt or zf");
}

McEstimate binomial_estimate(std::int64_t failures, std::int64_t trials, std::uint64_t seed) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), trials, seed};
}

namespace {

struct FailureCounts {
  std::int64_t comm = 0;
  std::int64_t control = 0;
  std::int64_t mrt = 0;
  std::int64_t zf = 0;
};

template <typename Body>
FailureCounts count_failures(std::int64_t trials, std::uint64_t seed, Execution exec,
                             const Body& body) {
  if (trials < 1) throw DomainError("outage estimate: trials must be >= 1");
  std::int64_t comm = 0;
  std::int64_t control = 0;
  std::int64_t mrt = 0;
  std::int64_t zf = 0;
  auto one = [&](std::int64_t t, FailureCounts& c) {
    RandomStream rng(seed ^ kOutageSalt, static_cast<std::uint64_t>(t));
    body(rng, c);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static, kChunk) reduction(+ : comm, control, mrt, zf)
    for (std::int64_t t = 0; t < trials; ++t) {
      FailureCounts c;
      one(t, c);
      comm += c.comm;
      control += c.control;
      mrt += c.mrt;
      zf += c.zf;
    }
  } else {
    for (std::int64_t t = 0; t < trials; ++t) {
      FailureCounts c;
      one(t, c);
      comm += c.comm;
      control += c.control;
      mrt += c.mrt;
      zf += c.zf;
    }
  }
  return {comm, control, mrt, zf};
}

}  // namespace

McEstimate estimate_comm_outage(const OutageSpec& spec, const SystemConfig& cfg,
                                std::int64_t trials, std::uint64_t seed, Execution exec) {
  const OutageJudge judge(spec, cfg);
  const FailureCounts f = count_failures(trials, seed, exec, [&](RandomStream& rng, FailureCounts& c) {
    c.comm += !judge.comm_success(draw_channels(cfg, rng));
  });
  return binomial_estimate(f.comm, trials, seed);
}

McEstimate estimate_control_outage(const OutageSpec& spec, const SystemConfig& cfg,
                                   std::int64_t trials, std::uint64_t seed, Execution exec) {
  const OutageJudge judge(spec, cfg);
  const FailureCounts f = count_failures(trials, seed, exec, [&](RandomStream& rng, FailureCounts& c) {
    c.control += !judge.control_success(draw_channels(cfg, rng));
  });
  return binomial_estimate(f.control, trials, seed);
}

McEstimate estimate_joint_outage(Scheme scheme, const OutageSpec& spec, const SystemConfig& cfg,
                                 std::int64_t trials, std::uint64_t seed, Execution exec) {
  if (scheme != Scheme::mrt && scheme != Scheme::zf) {
    throw DomainError("estimate_joint_outage: scheme must be mrt or zf");
  }
  const OutageJudge judge(spec, cfg);
  const FailureCounts f = count_failures(trials, seed, exec, [&](RandomStream& rng, FailureCounts& c) {
    c.mrt += !judge.joint_success(scheme, draw_channels(cfg, rng));
  });
  return binomial_estimate(f.mrt, trials, seed);
}

OutageEstimates estimate_outages(const OutageSpec& spec, const SystemConfig& cfg,
                                 std::int64_t trials, std::uint64_t seed, Execution exec) {
  const OutageJudge judge(spec, cfg);
  const FailureCounts f = count_failures(trials, seed, exec, [&](RandomStream& rng, FailureCounts& c) {
    const ChannelDraw d = draw_channels(cfg, rng);
    c.comm += !judge.comm_success(d);
    c.control += !judge.control_success(d);
    c.mrt += !judge.joint_success(Scheme::mrt, d);
    c.zf += !judge.joint_success(Scheme::zf, d);
  });
  return {binomial_estimate(f.comm, trials, seed), binomial_estimate(f.control, trials, seed),
          binomial_estimate(f.mrt, trials, seed), binomial_estimate(f.zf, trials, seed)};
}

}  // namespace jdcc
