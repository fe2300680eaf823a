// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>

namespace jdcc {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct RootResult {
  double root;
  int iterations;
};

// Bisection for a sign change of `f` on [lo, hi]. Requires f(lo) and f(hi)
// of opposite sign (zero counts as either). Stops once the bracket width is
// below rel_tol * |midpoint| (or an absolute floor for roots near zero).
// Throws DomainError if the bracket is invalid.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol = 1e-12, int max_iterations = 400);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
// Repeatedly bisects the subinterval with the largest error estimate until
// the summed estimate is below abs_tol or max_intervals is reached.
// Never throws; callers inspect `converged`.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, int max_intervals = 4000);

}  // namespace jdcc
