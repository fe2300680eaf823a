// SPDX-License-Identifier: Apache-2.0
//
// Physical layer: path loss, i.i.d. Rayleigh channel draws, uplink SNR and
// downlink SINRs for a two-beam broadcast, plus the Gamma(M,1) and
// channel-correlation densities used by the outage analysis.
//
// All quantities are linear SI units (W, Hz, s, W/Hz). dB conversion
// happens only in scenario loading.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "jdcc/control.hpp"
#include "jdcc/rng.hpp"

namespace jdcc {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;

struct SystemConfig {
  int antennas = 4;
  double p_dn = 1e-6;           ///< W
  double p_up = 1e-6;           ///< W
  double b_dn = 2e4;            ///< Hz
  double b_up = 1e4;            ///< Hz
  double t_s = 1e-4;            ///< control sampling period, s
  double n0 = 3.981071705534973e-21;  ///< W/Hz (-174 dBm/Hz)
  double payload_bits = 1000.0;
  double d_u = 100.0;           ///< m
  double d_d = 120.0;           ///< m
  double c0 = 1e-3;             ///< reference path gain (-30 dB)
  double path_loss_exp = 3.2;
  Plant plant{};

  double sigma_dn2() const noexcept { return n0 * b_dn; }
  double sigma_up2() const noexcept { return n0 * b_up; }
  double alpha_up() const noexcept { return b_up * t_s; }
  double alpha_dn() const noexcept { return b_dn * t_s; }
  double beta_u() const;
  double beta_d() const;

  /// Throws DomainError naming the first violated constraint.
  void validate() const;
};

/// C0 * d^-alpha. Throws DomainError for non-positive arguments.
double path_loss(double distance, double c0, double alpha);

/// M i.i.d. CN(0, beta) entries.
CVec sample_channel(int antennas, double beta, RandomStream& rng);

/// a^H b with compensated accumulation.
cdouble inner(std::span<const cdouble> a, std::span<const cdouble> b);
/// ||v||^2 with compensated accumulation.
double norm_sq(std::span<const cdouble> v);

/// |a^H b|^2 / (||a||^2 ||b||^2), clamped to [0, 1]. Throws DomainError on a
/// zero vector.
double correlation(std::span<const cdouble> a, std::span<const cdouble> b);

struct ChannelPair {
  CVec h_d;  ///< controllable device (uplink and downlink under TDD reciprocity)
  CVec h_u;  ///< communication user
  double g_d = 0.0;
  double g_u = 0.0;
  double rho = 0.0;

  /// Derives gains and correlation. A zero vector gets rho = 0.
  static ChannelPair from_vectors(CVec h_d, CVec h_u);
  int antennas() const noexcept { return static_cast<int>(h_d.size()); }
};

/// Two-dimensional synthetic pair with prescribed gains and correlation,
/// padded with zeros to `antennas` entries.
ChannelPair synthetic_channel(int antennas, double g_d, double g_u, double rho);

struct Beamformer {
  CVec w_d;
  CVec w_u;
  double power_budget = 0.0;

  /// Throws DomainError if the beams exceed the budget by more than 1e-9 relative.
  void validate() const;
};

/// Beams along the users' own channels with powers p_d and p_u.
Beamformer mrt_beamformer(const ChannelPair& ch, double p_d, double p_u, double budget);
/// Beams projected onto the other user's null space. Throws DegenerateGeometry
/// if the channels are collinear.
Beamformer zf_beamformer(const ChannelPair& ch, double p_d, double p_u, double budget);

double uplink_snr(const SystemConfig& cfg, const ChannelPair& ch);
/// S_alpha = (1 + uplink SNR)^alpha_up.
double uplink_quality(const SystemConfig& cfg, const ChannelPair& ch);

struct DownlinkSinrs {
  double gamma_u;
  double gamma_d;
};

DownlinkSinrs downlink_sinrs(const ChannelPair& ch, const Beamformer& bf, double sigma_dn2);

// Gamma(M, 1) law of ||h||^2 / beta. Terms are built iteratively without
// factorial tables; exact in double precision for M <= 20 (the loop itself
// works for larger M but x^k/k! may overflow once x exceeds ~700).
double gamma_cdf(int shape, double x);
/// 1 - gamma_cdf, evaluated without cancellation in the upper tail.
double gamma_sf(int shape, double x);
double gamma_pdf(int shape, double x);
/// Density (M-1)(1-r)^(M-2) of the correlation between two independent
/// isotropic vectors in C^M. Requires M >= 2.
double corr_pdf(int shape, double r);

}  // namespace jdcc
