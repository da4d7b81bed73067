#include "qabsorb/q_algebra.hpp"

#include <cmath>
#include <string>

#include "qabsorb/errors.hpp"
#include "qabsorb/numerics.hpp"

namespace qabsorb {

namespace {

constexpr double kMaxExponent = 700.0;

double deformed_exp_minus_one(double y, QParam q) {
  const double exponent = q.one_minus_q * y;
  if (exponent > kMaxExponent) {
    throw OverflowError("q-deformation exponent " + std::to_string(exponent) + " overflows");
  }
  return std::expm1(exponent) / q.one_minus_q;
}

}  // namespace

bool QParam::is_limit() const { return std::fabs(one_minus_q) < kQLimitThreshold; }

bool has_degenerate_varentropy(const InfoMoments& moments) {
  return !(moments.varentropy > 1e-15 * std::fmax(1.0, moments.h1 * moments.h1));
}

double ln_q_of_exp(double y, QParam q) { return q.is_limit() ? y : deformed_exp_minus_one(y, q); }

double ln_q(double x, QParam q) {
  if (!(x > 0.0)) {
    throw DomainError("ln_q: argument must be positive");
  }
  return ln_q_of_exp(std::log(x), q);
}

double tsallis_entropy(const SourcePmf& pmf, QParam q) {
  // sum_x p_x ln_q(1/p_x) is algebraically (1 - sum p^q)/(q - 1) and avoids
  // subtracting two nearly equal quantities when q is close to 1.
  CompensatedSum acc;
  const auto& probs = pmf.probs();
  const auto& logs = pmf.log_probs();
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    acc.add(probs[x] * ln_q_of_exp(-logs[x], q));
  }
  return acc.value();
}

double q_entropy_expansion(const InfoMoments& moments, QParam q) {
  return moments.h1 + 0.5 * q.one_minus_q * (moments.varentropy + moments.h1 * moments.h1);
}

double q_info_density(double joint_prob, QParam q) {
  if (!(joint_prob > 0.0)) {
    throw DomainError("q_info_density: joint probability must be positive");
  }
  return ln_q_of_exp(-std::log(joint_prob), q);
}

double log_mgf_fluctuation(const SourcePmf& pmf, long long n, double theta) {
  if (n < 1) {
    throw DomainError("log_mgf_fluctuation: blocklength must be positive");
  }
  if (theta == 0.0) {
    return 0.0;
  }
  const InfoMoments moments = info_moments(pmf, 3);
  // sum_x p_x exp(theta d_x) - 1, kept small to feed log1p.
  CompensatedSum acc;
  const auto& probs = pmf.probs();
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    acc.add(probs[x] * std::expm1(theta * moments.deviations[x]));
  }
  return static_cast<double>(n) * std::log1p(acc.value());
}

double mgf_fluctuation(const SourcePmf& pmf, long long n, double theta) {
  const double log_mgf = log_mgf_fluctuation(pmf, n, theta);
  if (log_mgf > kMaxExponent) {
    throw OverflowError("mgf_fluctuation: log-MGF " + std::to_string(log_mgf) + " exceeds 700");
  }
  return std::exp(log_mgf);
}

CentralizedQDensity::CentralizedQDensity(const SourcePmf& pmf, long long n, QParam q) : q_(q) {
  if (n < 1) {
    throw DomainError("CentralizedQDensity: blocklength must be positive");
  }
  mean_ = static_cast<double>(n) * info_moments(pmf, 3).h1;
  if (!q_.is_limit()) {
    const double log_mgf = log_mgf_fluctuation(pmf, n, q_.one_minus_q);
    if (log_mgf > kMaxExponent) {
      throw OverflowError("CentralizedQDensity: log-MGF " + std::to_string(log_mgf) +
                          " exceeds 700");
    }
    mgf_minus_one_ = std::expm1(log_mgf);
  }
}

double CentralizedQDensity::from_fluctuation(double w) const {
  if (q_.is_limit()) {
    return mean_ + w;
  }
  return mean_ + (deformed_exp_minus_one(w, q_) - mgf_minus_one_ / q_.one_minus_q);
}

double centralized_q_density(double s_n, const SourcePmf& pmf, long long n, QParam q) {
  return CentralizedQDensity(pmf, n, q)(s_n);
}

double fluctuation_term(double w, QParam q, int k, const BlockMoments& block) {
  if (k < 2) {
    throw DomainError("fluctuation_term: degree must be at least 2");
  }
  if (k > block.max_order()) {
    throw DomainError("fluctuation_term: block moment of order " + std::to_string(k) +
                      " missing");
  }
  double coefficient = 1.0;
  for (int j = 1; j <= k; ++j) {
    coefficient /= j;
  }
  coefficient *= std::pow(q.one_minus_q, k - 1);
  return coefficient * (std::pow(w, k) - block.central(k));
}

double truncated_fluctuation_expansion(double w, double n_h1, QParam q, int max_k,
                                       const BlockMoments& block) {
  CompensatedSum acc;
  acc.add(n_h1);
  acc.add(w);
  for (int k = 2; k <= max_k; ++k) {
    acc.add(fluctuation_term(w, q, k, block));
  }
  return acc.value();
}

QParam scaling_q(ScalingLaw law, long long n) {
  if (n < 1) {
    throw DomainError("scaling_q: blocklength must be positive");
  }
  return QParam::from_one_minus_q(law.alpha / static_cast<double>(n));
}

ScalingLaw optimal_alpha(const InfoMoments& moments) {
  if (has_degenerate_varentropy(moments)) {
    throw DegenerateSourceError(
        "optimal_alpha: varentropy is zero; the q-deformation is undefined for this source");
  }
  return {moments.third_central / (3.0 * moments.varentropy * moments.varentropy)};
}

}  // namespace qabsorb
