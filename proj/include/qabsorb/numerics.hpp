#pragma once

#include <cmath>
#include <span>

namespace qabsorb {

struct RealTolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;

  RealTolerance() = default;
  RealTolerance(double abs, double rel);

  [[nodiscard]] bool close(double a, double b) const;
};

/// Natural log of the gamma function for x > 0.
///
/// Shifts small arguments up by the recurrence and evaluates the Stirling
/// series there. Pure, unlike std::lgamma which may write signgam.
double log_gamma(double x);

/// ln(n!) for non-negative integer n.
double log_factorial(long long n);

/// Upper-tail probability P(Z > z) of the standard normal.
double q_function(double z);

/// Standard normal density.
double normal_pdf(double z);

/// Z such that Q(Z) = eps. AS241 (PPND16) initial value followed by a
/// Newton step against q_function.
double inv_q_function(double eps);

/// Neumaier-compensated running sum. Several modules keep one of these per
/// accumulator, so it is exposed alongside stable_sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Compensated sum of values in the given order.
double stable_sum(std::span<const double> values);

/// Compensated sum after sorting a copy ascending by magnitude.
double stable_sum_by_magnitude(std::span<const double> values);

/// ln(sum exp(v_i)) with max shift. Throws DomainError on empty input.
double log_sum_exp(std::span<const double> log_values);

/// Distance to the next representable double above |x|.
double ulp(double x);

}  // namespace qabsorb
