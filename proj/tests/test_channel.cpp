// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "jdcc/channel.hpp"
#include "jdcc/errors.hpp"
#include "jdcc/numeric.hpp"

using namespace jdcc;

namespace {

ChannelPair random_pair(int m, std::uint64_t id) {
  RandomStream rng(99, id);
  CVec hd = sample_channel(m, 1.0, rng);
  CVec hu = sample_channel(m, 1.0, rng);
  return ChannelPair::from_vectors(std::move(hd), std::move(hu));
}

}  // namespace

TEST_CASE("path loss") {
  CHECK(path_loss(1.0, 1e-3, 3.2) == doctest::Approx(1e-3).epsilon(1e-15));
  // Reference values from 40-digit arithmetic.
  CHECK(path_loss(100.0, 1e-3, 3.2) == doctest::Approx(3.981071705534972e-10).epsilon(1e-13));
  CHECK(path_loss(120.0, 1e-3, 3.2) == doctest::Approx(2.221365449290379e-10).epsilon(1e-13));
  CHECK_THROWS_AS(path_loss(0.0, 1e-3, 3.2), DomainError);
  CHECK_THROWS_AS(path_loss(10.0, -1.0, 3.2), DomainError);
}

TEST_CASE("channel samples are reproducible") {
  RandomStream a(5, 1);
  RandomStream b(5, 1);
  CHECK(sample_channel(4, 1.0, a) == sample_channel(4, 1.0, b));
}

TEST_CASE("normalised channel gain has Gamma(M, 1) moments") {
  RandomStream rng(2024, 3);
  CompensatedSum s1;
  CompensatedSum s2;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double g = norm_sq(sample_channel(4, 2.5, rng)) / 2.5;
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1.value() / n;
  const double var = s2.value() / n - mean * mean;
  CHECK(mean == doctest::Approx(4.0).epsilon(0.05 / 4.0));
  CHECK(var == doctest::Approx(4.0).epsilon(0.1 / 4.0));
}

TEST_CASE("correlation") {
  const ChannelPair r = random_pair(4, 1);
  CHECK(correlation(r.h_d, r.h_d) == doctest::Approx(1.0).epsilon(1e-15));
  const CVec e1{1.0, 0.0};
  const CVec e2{0.0, 1.0};
  const CVec diag{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  CHECK(correlation(e1, e2) == 0.0);
  CHECK(correlation(diag, e1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(correlation(CVec{0.0, 0.0}, e1), DomainError);
  const double rho = correlation(r.h_d, r.h_u);
  CHECK(rho >= 0.0);
  CHECK(rho <= 1.0);
  CHECK(r.rho == doctest::Approx(rho));
}

TEST_CASE("uplink SNR") {
  const SystemConfig cfg;
  CHECK(uplink_snr(cfg, synthetic_channel(4, 0.0, 1.0, 0.0)) == 0.0);
  const ChannelPair ch = synthetic_channel(4, 4.0 * 2.206e-10, 1e-9, 0.3);
  CHECK(uplink_snr(cfg, ch) == doctest::Approx(22.16488587164053).epsilon(1e-12));
  SystemConfig twice = cfg;
  twice.p_up *= 2.0;
  CHECK(uplink_snr(twice, ch) == doctest::Approx(2.0 * uplink_snr(cfg, ch)).epsilon(1e-15));
  CHECK(uplink_quality(cfg, ch) == doctest::Approx(std::pow(1.0 + uplink_snr(cfg, ch), cfg.alpha_up())));
}

TEST_CASE("synthetic channels have the requested gains and correlation") {
  for (double rho : {0.0, 0.25, 0.5, 0.99, 1.0}) {
    const ChannelPair ch = synthetic_channel(6, 3.0, 7.0, rho);
    CHECK(ch.antennas() == 6);
    CHECK(norm_sq(ch.h_d) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(norm_sq(ch.h_u) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(correlation(ch.h_d, ch.h_u) == doctest::Approx(rho).epsilon(1e-14));
  }
}

TEST_CASE("downlink SINRs") {
  const double s2 = 0.1;
  const CVec e1{2.0, 0.0, 0.0, 0.0};
  const CVec e2{0.0, 3.0, 0.0, 0.0};
  const ChannelPair orth = ChannelPair::from_vectors(e1, e2);
  SUBCASE("no CU beam") {
    const DownlinkSinrs s = downlink_sinrs(orth, mrt_beamformer(orth, 1.0, 0.0, 1.0), s2);
    CHECK(s.gamma_u == 0.0);
  }
  SUBCASE("orthogonal channels have no interference") {
    const DownlinkSinrs s = downlink_sinrs(orth, mrt_beamformer(orth, 0.4, 0.6, 1.0), s2);
    CHECK(s.gamma_u == doctest::Approx(0.6 * 9.0 / s2));
    CHECK(s.gamma_d == doctest::Approx(0.4 * 4.0 / s2));
  }
  SUBCASE("random instance against raw inner products") {
    const ChannelPair ch = random_pair(4, 17);
    const Beamformer bf = mrt_beamformer(ch, 0.3, 0.7, 1.0);
    const auto gain = [](const CVec& h, const CVec& w) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) acc += std::conj(h[i]) * w[i];
      return std::norm(acc);
    };
    const DownlinkSinrs s = downlink_sinrs(ch, bf, s2);
    CHECK(s.gamma_u == doctest::Approx(gain(ch.h_u, bf.w_u) / (gain(ch.h_u, bf.w_d) + s2)).epsilon(1e-13));
    CHECK(s.gamma_d == doctest::Approx(gain(ch.h_d, bf.w_d) / (gain(ch.h_d, bf.w_u) + s2)).epsilon(1e-13));
  }
  SUBCASE("zero-forcing beams cancel cross terms") {
    const ChannelPair ch = random_pair(4, 18);
    const Beamformer bf = zf_beamformer(ch, 0.5, 0.5, 1.0);
    CHECK(std::norm(inner(ch.h_u, bf.w_d)) <= 1e-12 * std::norm(inner(ch.h_d, bf.w_d)));
    CHECK(std::norm(inner(ch.h_d, bf.w_u)) <= 1e-12 * std::norm(inner(ch.h_u, bf.w_u)));
    CHECK(norm_sq(bf.w_d) == doctest::Approx(0.5));
    CHECK_THROWS_AS(zf_beamformer(synthetic_channel(4, 1.0, 2.0, 1.0), 0.5, 0.5, 1.0), DegenerateGeometry);
  }
}

TEST_CASE("beamformer budget check") {
  const ChannelPair ch = random_pair(4, 3);
  Beamformer bf = mrt_beamformer(ch, 0.5, 0.5, 1.0);
  CHECK_NOTHROW(bf.validate());
  bf.power_budget = 0.9;
  CHECK_THROWS_AS(bf.validate(), DomainError);
}

TEST_CASE("Gamma(M, 1) distribution against Boost") {
  CHECK(gamma_cdf(4, 0.0) == 0.0);
  CHECK(gamma_cdf(4, 4.0) == doctest::Approx(0.56653).epsilon(1e-5 / 0.56653));
  for (double x : {0.1, 0.7, 2.0, 5.0}) CHECK(gamma_cdf(1, x) == doctest::Approx(-std::expm1(-x)).epsilon(1e-15));
  for (int m : {1, 2, 4, 6, 12}) {
    for (double x : {1e-3, 0.5, 3.0, 10.0, 40.0}) {
      CHECK(gamma_cdf(m, x) == doctest::Approx(boost::math::gamma_p(m, x)).epsilon(1e-13));
      CHECK(gamma_sf(m, x) == doctest::Approx(boost::math::gamma_q(m, x)).epsilon(1e-12));
      CHECK(gamma_pdf(m, x) == doctest::Approx(boost::math::gamma_p_derivative(m, x)).epsilon(1e-12));
    }
  }
  CHECK(gamma_cdf(4, INFINITY) == 1.0);
  CHECK(gamma_sf(4, INFINITY) == 0.0);
}

TEST_CASE("densities integrate to one") {
  using boost::math::quadrature::gauss_kronrod;
  const double gmass = gauss_kronrod<double, 61>::integrate([](double x) { return gamma_pdf(4, x); }, 0.0,
                                                           std::numeric_limits<double>::infinity(), 15, 1e-14);
  CHECK(gmass == doctest::Approx(1.0).epsilon(1e-8));
  for (int m : {2, 4, 6}) {
    const double cmass =
        gauss_kronrod<double, 61>::integrate([m](double r) { return corr_pdf(m, r); }, 0.0, 1.0, 15, 1e-15);
    CHECK(cmass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("sampled correlation follows corr_pdf (Kolmogorov-Smirnov)") {
  const int m = 4;
  const int n = 100000;
  RandomStream rng(31, 4);
  const CVec fixed{1.0, 0.0, 0.0, 0.0};
  std::vector<double> r(n);
  for (auto& v : r) v = correlation(sample_channel(m, 1.0, rng), fixed);
  std::sort(r.begin(), r.end());
  // Model CDF by integrating corr_pdf between consecutive sample points.
  using boost::math::quadrature::gauss_kronrod;
  double cdf = 0.0;
  double prev = 0.0;
  double ks = 0.0;
  for (int k = 0; k < n; ++k) {
    cdf += gauss_kronrod<double, 15>::integrate([m](double x) { return corr_pdf(m, x); }, prev, r[k], 0, 0);
    prev = r[k];
    ks = std::max({ks, std::fabs(cdf - static_cast<double>(k) / n), std::fabs(cdf - static_cast<double>(k + 1) / n)});
  }
  CHECK(ks < 0.01);
}
