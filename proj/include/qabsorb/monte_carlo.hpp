#pragma once

#include <cstdint>
#include <vector>

#include "qabsorb/source_model.hpp"

namespace qabsorb {

struct McConfig {
  long long samples = 100'000;
  std::uint64_t seed = 0x5eed'0001ULL;
  std::vector<long long> n_grid{16, 64, 256, 1024, 4096};
  int max_k = 3;
  double alpha = 0.0;
  /// Worker threads; 0 picks hardware concurrency. Never changes results.
  unsigned threads = 0;
};

struct SlopeEstimate {
  int k = 0;
  double slope = 0.0;
  double std_error = 0.0;
  double expected = 0.0;  // 1 - k/2
};

struct CentralizationEstimate {
  double empirical_mean = 0.0;
  double z_score = 0.0;
};

/// One draw of W_n = S_n - n H1 from the stream keyed by (seed, n, index).
double sample_w_n(const SourcePmf& pmf, long long n, std::uint64_t sample_index,
                  std::uint64_t seed);

/// W_n for sample indices 0 .. samples-1, in index order.
std::vector<double> sample_fluctuations(const SourcePmf& pmf, long long n, long long samples,
                                        std::uint64_t seed, unsigned threads = 0);

/// Mean of the centralized q-density with 1 - q_n = alpha / n, and its
/// z-score against n H1. A zero standard error gives z = 0.
CentralizationEstimate verify_centralization(const SourcePmf& pmf, long long n,
                                             const McConfig& cfg);

/// Log-log slopes of the per-degree term standard deviations against n,
/// for k = 1 (raw W_n) through cfg.max_k.
std::vector<SlopeEstimate> estimate_term_scaling(const SourcePmf& pmf, const McConfig& cfg);

/// Order statistic ceil((1 - eps) samples) of the centralized q-density.
double empirical_q_quantile(const SourcePmf& pmf, long long n, double eps, const McConfig& cfg);

/// Sample standard deviation, two-pass with compensated sums.
double sample_stddev(const std::vector<double>& values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qabsorb
