// SPDX-License-Identifier: Apache-2.0
#include "jdcc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jdcc/errors.hpp"
#include "jdcc/numeric.hpp"

namespace jdcc {

double path_loss(double distance, double c0, double alpha) {
  if (!(distance > 0.0)) throw DomainError("path_loss: distance must be positive");
  if (!(c0 > 0.0)) throw DomainError("path_loss: C0 must be positive");
  if (!(alpha > 0.0)) throw DomainError("path_loss: exponent must be positive");
  return c0 * std::pow(distance, -alpha);
}

double SystemConfig::beta_u() const { return path_loss(d_u, c0, path_loss_exp); }
double SystemConfig::beta_d() const { return path_loss(d_d, c0, path_loss_exp); }

void SystemConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("system: ") + name + " must be positive and finite");
    }
  };
  if (antennas < 2) throw DomainError("system: antennas must be >= 2");
  positive(p_dn, "p_dn");
  positive(p_up, "p_up");
  positive(b_dn, "b_dn");
  positive(b_up, "b_up");
  positive(t_s, "t_s");
  positive(n0, "n0");
  positive(payload_bits, "payload_bits");
  positive(d_u, "d_u");
  positive(d_d, "d_d");
  positive(c0, "c0");
  positive(path_loss_exp, "path_loss_exp");
  plant.validate();
}

CVec sample_channel(int antennas, double beta, RandomStream& rng) {
  if (antennas < 1) throw DomainError("sample_channel: antennas must be >= 1");
  if (!(beta > 0.0)) throw DomainError("sample_channel: beta must be positive");
  CVec h(static_cast<std::size_t>(antennas));
  for (auto& e : h) e = rng.complex_normal(beta);
  return h;
}

cdouble inner(std::span<const cdouble> a, std::span<const cdouble> b) {
  CompensatedSum re;
  CompensatedSum im;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const cdouble p = std::conj(a[i]) * b[i];
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.value(), im.value()};
}

double norm_sq(std::span<const cdouble> v) {
  CompensatedSum s;
  for (const auto& e : v) s.add(std::norm(e));
  return s.value();
}

double correlation(std::span<const cdouble> a, std::span<const cdouble> b) {
  const double na = norm_sq(a);
  const double nb = norm_sq(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("correlation: zero vector");
  return std::clamp(std::norm(inner(a, b)) / (na * nb), 0.0, 1.0);
}

ChannelPair ChannelPair::from_vectors(CVec h_d, CVec h_u) {
  if (h_d.size() != h_u.size()) throw DomainError("channel pair: length mismatch");
  ChannelPair ch;
  ch.g_d = norm_sq(h_d);
  ch.g_u = norm_sq(h_u);
  ch.rho = (ch.g_d > 0.0 && ch.g_u > 0.0) ? correlation(h_d, h_u) : 0.0;
  ch.h_d = std::move(h_d);
  ch.h_u = std::move(h_u);
  return ch;
}

ChannelPair synthetic_channel(int antennas, double g_d, double g_u, double rho) {
  if (antennas < 2) throw DomainError("synthetic_channel: antennas must be >= 2");
  if (!(g_d >= 0.0) || !(g_u >= 0.0)) throw DomainError("synthetic_channel: negative gain");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("synthetic_channel: rho outside [0,1]");
  CVec h_d(static_cast<std::size_t>(antennas));
  CVec h_u(static_cast<std::size_t>(antennas));
  h_d[0] = std::sqrt(g_d);
  h_u[0] = std::sqrt(g_u * rho);
  h_u[1] = std::sqrt(g_u * (1.0 - rho));
  return ChannelPair::from_vectors(std::move(h_d), std::move(h_u));
}

void Beamformer::validate() const {
  const double used = norm_sq(w_d) + norm_sq(w_u);
  if (used > power_budget * (1.0 + 1e-9)) throw DomainError("beamformer: power budget exceeded");
}

namespace {

CVec scaled_direction(std::span<const cdouble> v, double power) {
  const double n = norm_sq(v);
  CVec out(v.begin(), v.end());
  if (n <= 0.0 || power <= 0.0) {
    std::fill(out.begin(), out.end(), cdouble{});
    return out;
  }
  const double s = std::sqrt(power / n);
  for (auto& e : out) e *= s;
  return out;
}

// (I - h h^H / ||h||^2) v
CVec project_out(std::span<const cdouble> v, std::span<const cdouble> h) {
  const double nh = norm_sq(h);
  CVec out(v.begin(), v.end());
  if (nh <= 0.0) return out;
  const cdouble coef = inner(h, v) / nh;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= coef * h[i];
  return out;
}

}  // namespace

Beamformer mrt_beamformer(const ChannelPair& ch, double p_d, double p_u, double budget) {
  return {scaled_direction(ch.h_d, p_d), scaled_direction(ch.h_u, p_u), budget};
}

Beamformer zf_beamformer(const ChannelPair& ch, double p_d, double p_u, double budget) {
  if (ch.rho >= 1.0) throw DegenerateGeometry("zf_beamformer: collinear channels");
  const CVec dir_d = project_out(ch.h_d, ch.h_u);
  const CVec dir_u = project_out(ch.h_u, ch.h_d);
  return {scaled_direction(dir_d, p_d), scaled_direction(dir_u, p_u), budget};
}

double uplink_snr(const SystemConfig& cfg, const ChannelPair& ch) {
  return cfg.p_up * ch.g_d / cfg.sigma_up2();
}

double uplink_quality(const SystemConfig& cfg, const ChannelPair& ch) {
  return std::pow(1.0 + uplink_snr(cfg, ch), cfg.alpha_up());
}

DownlinkSinrs downlink_sinrs(const ChannelPair& ch, const Beamformer& bf, double sigma_dn2) {
  if (!(sigma_dn2 > 0.0)) throw DomainError("downlink_sinrs: noise power must be positive");
  const double uu = std::norm(inner(ch.h_u, bf.w_u));
  const double ud = std::norm(inner(ch.h_u, bf.w_d));
  const double dd = std::norm(inner(ch.h_d, bf.w_d));
  const double du = std::norm(inner(ch.h_d, bf.w_u));
  return {uu / (ud + sigma_dn2), dd / (du + sigma_dn2)};
}

double gamma_cdf(int shape, double x) {
  if (shape < 1) throw DomainError("gamma_cdf: shape must be >= 1");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x >= shape) return std::clamp(1.0 - gamma_sf(shape, x), 0.0, 1.0);
  // Lower tail: e^-x sum_{k>=M} x^k/k!, all terms positive.
  double term = std::exp(-x);
  for (int k = 1; k <= shape; ++k) term *= x / k;
  CompensatedSum sum;
  for (int k = shape + 1; term > 0.0; ++k) {
    sum.add(term);
    if (term < 1e-17 * sum.value()) break;
    term *= x / k;
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

double gamma_sf(int shape, double x) {
  if (shape < 1) throw DomainError("gamma_sf: shape must be >= 1");
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < shape) return std::clamp(1.0 - gamma_cdf(shape, x), 0.0, 1.0);
  double term = std::exp(-x);
  CompensatedSum sum;
  for (int k = 0; k < shape; ++k) {
    sum.add(term);
    term *= x / (k + 1);
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

double gamma_pdf(int shape, double x) {
  if (shape < 1) throw DomainError("gamma_pdf: shape must be >= 1");
  if (x < 0.0) return 0.0;
  double v = std::exp(-x);
  for (int k = 1; k < shape; ++k) v *= x / k;
  return v;
}

double corr_pdf(int shape, double r) {
  if (shape < 2) throw DomainError("corr_pdf: shape must be >= 2");
  if (r < 0.0 || r > 1.0) return 0.0;
  if (shape == 2) return 1.0;
  return (shape - 1) * std::pow(1.0 - r, shape - 2);
}

}  // namespace jdcc
