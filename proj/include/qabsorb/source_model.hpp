#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace qabsorb {

inline constexpr int kDefaultMaxOrder = 12;

/// Strictly positive probability vector of a memoryless finite-alphabet
/// source. Zero entries are rejected, not dropped.
class SourcePmf {
 public:
  explicit SourcePmf(std::vector<double> probs);

  /// P(1) = p, P(0) = 1 - p; symbol index 1 is the "1" outcome.
  static SourcePmf bernoulli(double p);
  static SourcePmf uniform(std::size_t alphabet_size);
  /// Comma-separated decimals, e.g. "0.11,0.89".
  static SourcePmf parse(std::string_view text);

  [[nodiscard]] std::size_t size() const { return probs_.size(); }
  [[nodiscard]] const std::vector<double>& probs() const { return probs_; }
  [[nodiscard]] const std::vector<double>& log_probs() const { return log_probs_; }
  [[nodiscard]] double prob(std::size_t symbol) const { return probs_.at(symbol); }
  /// True when every symbol carries the same self-information.
  [[nodiscard]] bool is_uniform() const;

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// Moments of the single-symbol self-information -ln P(X).
/// Vectors are indexed by order; central_moments[0] = 1, central_moments[1] = 0,
/// cumulants[0] is unused (0).
struct InfoMoments {
  double h1 = 0.0;
  double varentropy = 0.0;
  double third_central = 0.0;
  std::vector<double> central_moments;
  std::vector<double> cumulants;
  /// Per-symbol centered self-information, -ln p_x - h1.
  std::vector<double> deviations;

  [[nodiscard]] int max_order() const { return static_cast<int>(central_moments.size()) - 1; }
  [[nodiscard]] double central(int order) const;
  [[nodiscard]] double cumulant(int order) const;
};

/// Central moments E[W_n^j] of W_n = S_n - n H1, indexed by j.
struct BlockMoments {
  long long n = 0;
  std::vector<double> central_moments_w;

  [[nodiscard]] int max_order() const { return static_cast<int>(central_moments_w.size()) - 1; }
  [[nodiscard]] double central(int order) const;
};

struct BernoulliMoments {
  double h1;
  double varentropy;
  double third_central;
};

double self_information(const SourcePmf& pmf, std::size_t symbol);

InfoMoments info_moments(const SourcePmf& pmf, int max_order = kDefaultMaxOrder);

/// Closed forms with L = ln((1-p)/p). Independent of info_moments.
BernoulliMoments bernoulli_closed_forms(double p);

BlockMoments block_moments(const InfoMoments& moments, long long n, int max_order);

/// Cumulants (index 1..K) from central moments about the mean (index 0..K),
/// with cumulant 1 left at 0.
std::vector<double> central_to_cumulants(const std::vector<double>& central);
/// Inverse of central_to_cumulants for a zero-mean variable.
std::vector<double> cumulants_to_central(const std::vector<double>& cumulants);

}  // namespace qabsorb
