#include "qabsorb/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

#include "qabsorb/errors.hpp"
#include "qabsorb/numerics.hpp"
#include "qabsorb/philox.hpp"
#include "qabsorb/q_algebra.hpp"

namespace qabsorb {

namespace {

// Per-pmf sampling tables shared by every draw.
struct Sampler {
  std::vector<double> cumulative;  // inclusive CDF by symbol, last forced to 1
  std::vector<double> deviations;  // -ln p_x - H1

  explicit Sampler(const SourcePmf& pmf) : deviations(info_moments(pmf, 3).deviations) {
    CompensatedSum acc;
    for (const double p : pmf.probs()) {
      acc.add(p);
      cumulative.push_back(acc.value());
    }
    cumulative.back() = 1.0;
  }

  [[nodiscard]] std::size_t symbol(double u) const {
    std::size_t x = 0;
    while (u >= cumulative[x] && x + 1 < cumulative.size()) {
      ++x;
    }
    return x;
  }

  [[nodiscard]] double draw(long long n, std::uint64_t index, std::uint64_t seed) const {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    std::vector<long long> counts(cumulative.size(), 0);
    long long produced = 0;
    for (std::uint32_t block = 0; produced < n; ++block) {
      const Philox4x32::Counter ctr{block, static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32),
                                    static_cast<std::uint32_t>(n)};
      const auto out = Philox4x32::generate(ctr, key);
      ++counts[symbol(Philox4x32::to_unit(out[0], out[1]))];
      if (++produced < n) {
        ++counts[symbol(Philox4x32::to_unit(out[2], out[3]))];
        ++produced;
      }
    }
    // W_n = sum_x count_x (-ln p_x - H1), without forming S_n - n H1.
    CompensatedSum w;
    for (std::size_t x = 0; x < counts.size(); ++x) {
      w.add(static_cast<double>(counts[x]) * deviations[x]);
    }
    return w.value();
  }
};

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double sample_mean(const std::vector<double>& values) {
  return stable_sum(values) / static_cast<double>(values.size());
}

void check_samples(long long samples) {
  if (samples < 2) {
    throw DomainError("Monte Carlo: need at least two samples");
  }
}

}  // namespace

double sample_w_n(const SourcePmf& pmf, long long n, std::uint64_t sample_index,
                  std::uint64_t seed) {
  if (n < 1) {
    throw DomainError("sample_w_n: blocklength must be positive");
  }
  return Sampler(pmf).draw(n, sample_index, seed);
}

std::vector<double> sample_fluctuations(const SourcePmf& pmf, long long n, long long samples,
                                        std::uint64_t seed, unsigned threads) {
  if (n < 1) {
    throw DomainError("sample_fluctuations: blocklength must be positive");
  }
  if (samples < 1) {
    throw DomainError("sample_fluctuations: sample count must be positive");
  }
  const Sampler sampler(pmf);
  std::vector<double> out(static_cast<std::size_t>(samples));
  const auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = sampler.draw(n, i, seed);
    }
  };
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max(1LL, samples / 1024)));
  if (workers <= 1) {
    fill(0, out.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (out.size() + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = std::min(out.size(), t * chunk);
    const std::size_t end = std::min(out.size(), begin + chunk);
    pool.emplace_back(fill, begin, end);
  }
  for (auto& th : pool) {
    th.join();
  }
  return out;
}

double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw DomainError("sample_stddev: need at least two values");
  }
  const double mean = sample_mean(values);
  CompensatedSum acc;
  for (const double v : values) {
    acc.add((v - mean) * (v - mean));
  }
  return std::sqrt(acc.value() / static_cast<double>(values.size() - 1));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw DomainError("fit_line: need at least three paired points");
  }
  const auto count = static_cast<double>(x.size());
  const double mx = stable_sum(x) / count;
  const double my = stable_sum(y) / count;
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) {
    throw DomainError("fit_line: abscissae are all equal");
  }
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum rss;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss.add(r * r);
  }
  fit.slope_stderr = std::sqrt(rss.value() / (count - 2.0) / sxx.value());
  return fit;
}

CentralizationEstimate verify_centralization(const SourcePmf& pmf, long long n,
                                             const McConfig& cfg) {
  check_samples(cfg.samples);
  const CentralizedQDensity map(pmf, n, scaling_q({cfg.alpha}, n));
  std::vector<double> values = sample_fluctuations(pmf, n, cfg.samples, cfg.seed, cfg.threads);
  for (double& v : values) {
    v = map.from_fluctuation(v);
  }
  CentralizationEstimate est;
  est.empirical_mean = sample_mean(values);
  const double se = sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
  est.z_score = se > 0.0 ? (est.empirical_mean - map.mean()) / se : 0.0;
  return est;
}

std::vector<SlopeEstimate> estimate_term_scaling(const SourcePmf& pmf, const McConfig& cfg) {
  if (cfg.max_k < 2 || cfg.max_k > 6) {
    throw DomainError("estimate_term_scaling: max_k must lie in [2, 6]");
  }
  if (cfg.samples < 10'000) {
    throw DomainError("estimate_term_scaling: slope estimation needs at least 10^4 samples");
  }
  const auto& grid = cfg.n_grid;
  if (grid.size() < 4 || grid.front() < 1 ||
      !std::is_sorted(grid.begin(), grid.end(), std::less_equal<>{}) ||
      static_cast<double>(grid.back()) < 100.0 * static_cast<double>(grid.front())) {
    throw DomainError(
        "estimate_term_scaling: n_grid must be strictly increasing with >= 4 points over "
        ">= 2 decades");
  }
  const InfoMoments moments = info_moments(pmf, std::max(3, cfg.max_k));

  const auto degrees = static_cast<std::size_t>(cfg.max_k);
  std::vector<std::vector<double>> log_sd(degrees, std::vector<double>{});
  std::vector<double> log_n;
  for (const long long n : grid) {
    const std::vector<double> w = sample_fluctuations(pmf, n, cfg.samples, cfg.seed, cfg.threads);
    const BlockMoments block = block_moments(moments, n, cfg.max_k);
    const QParam q = scaling_q({cfg.alpha}, n);
    log_n.push_back(std::log(static_cast<double>(n)));
    for (int k = 1; k <= cfg.max_k; ++k) {
      std::vector<double> term(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        term[i] = k == 1 ? w[i] : fluctuation_term(w[i], q, k, block);
      }
      const double sd = sample_stddev(term);
      if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw DomainError("estimate_term_scaling: degenerate fit, term " + std::to_string(k) +
                          " has zero spread at n = " + std::to_string(n));
      }
      log_sd[static_cast<std::size_t>(k - 1)].push_back(std::log(sd));
    }
  }

  std::vector<SlopeEstimate> out;
  for (int k = 1; k <= cfg.max_k; ++k) {
    const LineFit fit = fit_line(log_n, log_sd[static_cast<std::size_t>(k - 1)]);
    out.push_back({k, fit.slope, fit.slope_stderr, 1.0 - k / 2.0});
  }
  return out;
}

double empirical_q_quantile(const SourcePmf& pmf, long long n, double eps, const McConfig& cfg) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("empirical_q_quantile: eps must lie in (0, 1)");
  }
  if (static_cast<double>(cfg.samples) < 100.0 / eps) {
    throw DomainError("empirical_q_quantile: need at least 100 / eps samples");
  }
  const CentralizedQDensity map(pmf, n, scaling_q({cfg.alpha}, n));
  std::vector<double> values = sample_fluctuations(pmf, n, cfg.samples, cfg.seed, cfg.threads);
  for (double& v : values) {
    v = map.from_fluctuation(v);
  }
  const auto count = static_cast<double>(values.size());
  // The 1e-9 slack keeps (1 - eps) * N from rounding up past an exact integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - eps) * count - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

}  // namespace qabsorb
