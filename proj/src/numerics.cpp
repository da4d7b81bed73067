#include "qabsorb/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <vector>

#include "qabsorb/errors.hpp"

namespace qabsorb {

RealTolerance::RealTolerance(double abs, double rel) : abs_tol(abs), rel_tol(rel) {
  if (!(abs > 0.0) || !(rel > 0.0)) {
    throw DomainError("RealTolerance: tolerances must be positive");
  }
}

bool RealTolerance::close(double a, double b) const {
  const double diff = std::fabs(a - b);
  return diff <= abs_tol || diff <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

namespace {

constexpr double kStirlingThreshold = 15.0;

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number coefficients B_2k / (2k (2k-1)), highest first.
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// AS241 PPND16: lower-tail standard normal quantile, ~1e-16 relative.
double ppnd16(double p) {
  constexpr double split1 = 0.425;
  constexpr double split2 = 5.0;
  constexpr double const1 = 0.180625;
  constexpr double const2 = 1.6;

  constexpr double a0 = 3.3871328727963666080e0;
  constexpr double a1 = 1.3314166789178437745e+2;
  constexpr double a2 = 1.9715909503065514427e+3;
  constexpr double a3 = 1.3731693765509461125e+4;
  constexpr double a4 = 4.5921953931549871457e+4;
  constexpr double a5 = 6.7265770927008700853e+4;
  constexpr double a6 = 3.3430575583588128105e+4;
  constexpr double a7 = 2.5090809287301226727e+3;
  constexpr double b1 = 4.2313330701600911252e+1;
  constexpr double b2 = 6.8718700749205790830e+2;
  constexpr double b3 = 5.3941960214247511077e+3;
  constexpr double b4 = 2.1213794301586595867e+4;
  constexpr double b5 = 3.9307895800092710610e+4;
  constexpr double b6 = 2.8729085735721942674e+4;
  constexpr double b7 = 5.2264952788528545610e+3;

  constexpr double c0 = 1.42343711074968357734e0;
  constexpr double c1 = 4.63033784615654529590e0;
  constexpr double c2 = 5.76949722146069140550e0;
  constexpr double c3 = 3.64784832476320460504e0;
  constexpr double c4 = 1.27045825245236838258e0;
  constexpr double c5 = 2.41780725177450611770e-1;
  constexpr double c6 = 2.27238449892691845833e-2;
  constexpr double c7 = 7.74545014278341407640e-4;
  constexpr double d1 = 2.05319162663775882187e0;
  constexpr double d2 = 1.67638483018380384940e0;
  constexpr double d3 = 6.89767334985100004550e-1;
  constexpr double d4 = 1.48103976427480074590e-1;
  constexpr double d5 = 1.51986665636164571966e-2;
  constexpr double d6 = 5.47593808499534494600e-4;
  constexpr double d7 = 1.05075007164441684324e-9;

  constexpr double e0 = 6.65790464350110377720e0;
  constexpr double e1 = 5.46378491116411436990e0;
  constexpr double e2 = 1.78482653991729133580e0;
  constexpr double e3 = 2.96560571828504891230e-1;
  constexpr double e4 = 2.65321895265761230930e-2;
  constexpr double e5 = 1.24266094738807843860e-3;
  constexpr double e6 = 2.71155556874348757815e-5;
  constexpr double e7 = 2.01033439929228813265e-7;
  constexpr double f1 = 5.99832206555887937690e-1;
  constexpr double f2 = 1.36929880922735805310e-1;
  constexpr double f3 = 1.48753612908506148525e-2;
  constexpr double f4 = 7.86869131145613259100e-4;
  constexpr double f5 = 1.84631831751005468180e-5;
  constexpr double f6 = 1.42151175831644588870e-7;
  constexpr double f7 = 2.04426310338993978564e-15;

  const double q = p - 0.5;
  if (std::fabs(q) <= split1) {
    const double r = const1 - q * q;
    return q * (((((((a7 * r + a6) * r + a5) * r + a4) * r + a3) * r + a2) * r + a1) * r + a0) /
           (((((((b7 * r + b6) * r + b5) * r + b4) * r + b3) * r + b2) * r + b1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= split2) {
    r -= const2;
    value = (((((((c7 * r + c6) * r + c5) * r + c4) * r + c3) * r + c2) * r + c1) * r + c0) /
            (((((((d7 * r + d6) * r + d5) * r + d4) * r + d3) * r + d2) * r + d1) * r + 1.0);
  } else {
    r -= split2;
    value = (((((((e7 * r + e6) * r + e5) * r + e4) * r + e3) * r + e2) * r + e1) * r + e0) /
            (((((((f7 * r + f6) * r + f5) * r + f4) * r + f3) * r + f2) * r + f1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("log_gamma: argument must be positive");
  }
  if (x == 1.0 || x == 2.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return x;
  }
  if (x >= kStirlingThreshold) {
    return stirling_log_gamma(x);
  }
  // ln Gamma(x) = ln Gamma(x + k) - ln(x (x+1) ... (x+k-1))
  double shifted = x;
  double product = 1.0;
  while (shifted < kStirlingThreshold) {
    product *= shifted;
    shifted += 1.0;
  }
  return stirling_log_gamma(shifted) - std::log(product);
}

double log_factorial(long long n) {
  if (n < 0) {
    throw DomainError("log_factorial: negative argument");
  }
  return n < 2 ? 0.0 : log_gamma(static_cast<double>(n) + 1.0);
}

double q_function(double z) { return 0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double inv_q_function(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("inv_q_function: eps must lie in (0, 1)");
  }
  // 1 - eps is exact on [0.5, 1), so the upper half folds onto the lower.
  if (eps > 0.5) {
    return -inv_q_function(1.0 - eps);
  }
  const double z0 = -ppnd16(eps);
  const double density = normal_pdf(z0);
  if (density <= 0.0) {
    return z0;
  }
  return z0 + (q_function(z0) - eps) / density;
}

double stable_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (const double v : values) {
    acc.add(v);
  }
  return acc.value();
}

double stable_sum_by_magnitude(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(),
            [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  return stable_sum(sorted);
}

double log_sum_exp(std::span<const double> log_values) {
  if (log_values.empty()) {
    throw DomainError("log_sum_exp: empty input");
  }
  const double top = *std::max_element(log_values.begin(), log_values.end());
  if (std::isinf(top)) {
    return top;
  }
  CompensatedSum acc;
  for (const double v : log_values) {
    acc.add(std::exp(v - top));
  }
  return top + std::log(acc.value());
}

double ulp(double x) {
  const double a = std::fabs(x);
  return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

}  // namespace qabsorb
