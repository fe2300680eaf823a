// SPDX-License-Identifier: Apache-2.0
#include "jdcc/numeric.hpp"

#include <array>
#include <algorithm>
#include <vector>

#include "jdcc/errors.hpp"

namespace jdcc {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                  int max_iterations) {
  if (!(lo < hi)) throw DomainError("bisect: empty bracket");
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw DomainError("bisect: function does not change sign on bracket");
  }
  int it = 0;
  while (it < max_iterations) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket is one ulp wide
    const double f_mid = f(mid);
    if (f_mid == 0.0) return {mid, it};
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= rel_tol * std::fabs(0.5 * (lo + hi))) break;
  }
  return {0.5 * (lo + hi), it};
}

namespace {

// Kronrod abscissae and weights for the 7/15 pair (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kWgk[7];
  double gauss = f_center * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  const double error = std::fabs((kronrod - gauss) * half);
  return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_intervals) {
  QuadratureResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  std::vector<Segment> segments{gk15(f, a, b)};
  auto total_error = [&] {
    CompensatedSum e;
    for (const auto& s : segments) e.add(s.error);
    return e.value();
  };
  double error = segments.front().error;
  while (error > abs_tol && static_cast<int>(segments.size()) < max_intervals) {
    auto worst = std::max_element(segments.begin(), segments.end());
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    *worst = gk15(f, lo, mid);
    segments.push_back(gk15(f, mid, hi));
    error = total_error();
  }
  CompensatedSum sum;
  for (const auto& s : segments) sum.add(s.value);
  out.value = sum.value();
  out.error = error;
  out.intervals = static_cast<int>(segments.size());
  out.converged = error <= abs_tol;
  return out;
}

}  // namespace jdcc
