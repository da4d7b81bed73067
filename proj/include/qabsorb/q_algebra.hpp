#pragma once

#include "qabsorb/source_model.hpp"

namespace qabsorb {

/// Below this |1 - q| every q-deformed quantity takes its q = 1 branch.
inline constexpr double kQLimitThreshold = 1e-14;

/// Deformation parameter. 1 - q is stored directly; computing it from q
/// would cancel away the O(1/n) values the scaling law produces.
struct QParam {
  double q = 1.0;
  double one_minus_q = 0.0;

  static QParam from_q(double q) { return {q, 1.0 - q}; }
  static QParam from_one_minus_q(double d) { return {1.0 - d, d}; }
  static QParam identity() { return {}; }

  [[nodiscard]] bool is_limit() const;
};

/// 1 - q_n = alpha / n.
struct ScalingLaw {
  double alpha = 0.0;
};

/// V below this (scaled by max(1, H1^2)) counts as a degenerate source.
bool has_degenerate_varentropy(const InfoMoments& moments);

/// (x^{1-q} - 1) / (1 - q), evaluated as expm1((1-q) ln x) / (1-q).
double ln_q(double x, QParam q);

/// ln_q(e^y) without forming e^y; y may be large.
double ln_q_of_exp(double y, QParam q);

/// (1 - sum p^q) / (q - 1).
double tsallis_entropy(const SourcePmf& pmf, QParam q);

/// H1 + ((1-q)/2)(V + H1^2).
double q_entropy_expansion(const InfoMoments& moments, QParam q);

/// ln_q(1 / P(x^n)).
double q_info_density(double joint_prob, QParam q);

/// ln E[exp(theta W_n)] = n ln sum_x p_x exp(theta (-ln p_x - H1)).
double log_mgf_fluctuation(const SourcePmf& pmf, long long n, double theta);

/// E[exp(theta W_n)]. Throws OverflowError when the log-MGF exceeds 700.
double mgf_fluctuation(const SourcePmf& pmf, long long n, double theta);

/// The MGF-centered map s_n -> nH1 + (exp((1-q)W_n) - E exp((1-q)W_n)) / (1-q),
/// with the exact i.i.d. expectation precomputed once per (pmf, n, q).
class CentralizedQDensity {
 public:
  CentralizedQDensity(const SourcePmf& pmf, long long n, QParam q);

  [[nodiscard]] double operator()(double s_n) const { return from_fluctuation(s_n - mean_); }
  [[nodiscard]] double from_fluctuation(double w) const;

  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] QParam q() const { return q_; }

 private:
  QParam q_;
  double mean_ = 0.0;  // n H1
  double mgf_minus_one_ = 0.0;
};

double centralized_q_density(double s_n, const SourcePmf& pmf, long long n, QParam q);

/// ((1-q)^{k-1} / k!) (w^k - E[W_n^k]) for k >= 2.
double fluctuation_term(double w, QParam q, int k, const BlockMoments& block);

/// nH1 + w + sum_{k=2}^{max_k} fluctuation_term(w, q, k, block).
double truncated_fluctuation_expansion(double w, double n_h1, QParam q, int max_k,
                                       const BlockMoments& block);

QParam scaling_q(ScalingLaw law, long long n);

/// alpha = T / (3 V^2). Throws DegenerateSourceError when V is ~0.
ScalingLaw optimal_alpha(const InfoMoments& moments);

}  // namespace qabsorb
