#include "qabsorb/source_model.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "qabsorb/errors.hpp"
#include "qabsorb/numerics.hpp"

namespace qabsorb {

namespace {

constexpr double kMassTolerance = 1e-12;

// Binomial coefficients C(n, k) for n <= kDefaultMaxOrder, exact in double.
double binomial(int n, int k) {
  double result = 1.0;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return std::round(result);
}

}  // namespace

SourcePmf::SourcePmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw DomainError("SourcePmf: alphabet size must be at least 2");
  }
  for (const double p : probs_) {
    if (!std::isfinite(p) || !(p > 0.0)) {
      throw DomainError("SourcePmf: every probability must be strictly positive");
    }
  }
  const double total = stable_sum(probs_);
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw DomainError("SourcePmf: probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
  log_probs_.reserve(probs_.size());
  for (const double p : probs_) {
    log_probs_.push_back(std::log(p));
  }
}

SourcePmf SourcePmf::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("SourcePmf::bernoulli: p must lie in (0, 1)");
  }
  return SourcePmf({1.0 - p, p});
}

SourcePmf SourcePmf::uniform(std::size_t alphabet_size) {
  if (alphabet_size < 2) {
    throw DomainError("SourcePmf::uniform: alphabet size must be at least 2");
  }
  return SourcePmf(std::vector<double>(alphabet_size, 1.0 / static_cast<double>(alphabet_size)));
}

SourcePmf SourcePmf::parse(std::string_view text) {
  std::vector<double> probs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    std::string_view field = text.substr(pos, end - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
      field.remove_suffix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DomainError("SourcePmf::parse: malformed probability '" + std::string(field) + "'");
    }
    probs.push_back(value);
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  return SourcePmf(std::move(probs));
}

bool SourcePmf::is_uniform() const {
  for (const double lp : log_probs_) {
    if (lp != log_probs_.front()) {
      return false;
    }
  }
  return true;
}

double InfoMoments::central(int order) const {
  if (order < 0 || order > max_order()) {
    throw DomainError("InfoMoments: central moment order " + std::to_string(order) +
                      " not available");
  }
  return central_moments[static_cast<std::size_t>(order)];
}

double InfoMoments::cumulant(int order) const {
  if (order < 1 || order > max_order()) {
    throw DomainError("InfoMoments: cumulant order " + std::to_string(order) + " not available");
  }
  return cumulants[static_cast<std::size_t>(order)];
}

double BlockMoments::central(int order) const {
  if (order < 0 || order > max_order()) {
    throw DomainError("BlockMoments: central moment order " + std::to_string(order) +
                      " not available");
  }
  return central_moments_w[static_cast<std::size_t>(order)];
}

double self_information(const SourcePmf& pmf, std::size_t symbol) {
  if (symbol >= pmf.size()) {
    throw DomainError("self_information: symbol index out of range");
  }
  return -pmf.log_probs()[symbol];
}

std::vector<double> central_to_cumulants(const std::vector<double>& central) {
  // kappa_n = mu_n - sum_{k=2}^{n-1} C(n-1, k-1) kappa_k mu_{n-k}, with mu_1 = 0.
  const int order = static_cast<int>(central.size()) - 1;
  std::vector<double> kappa(central.size(), 0.0);
  for (int n = 2; n <= order; ++n) {
    CompensatedSum acc;
    acc.add(central[static_cast<std::size_t>(n)]);
    for (int k = 2; k <= n - 2; ++k) {
      acc.add(-binomial(n - 1, k - 1) * kappa[static_cast<std::size_t>(k)] *
              central[static_cast<std::size_t>(n - k)]);
    }
    kappa[static_cast<std::size_t>(n)] = acc.value();
  }
  return kappa;
}

std::vector<double> cumulants_to_central(const std::vector<double>& cumulants) {
  // mu_n = sum_{k=2}^{n} C(n-1, k-1) kappa_k mu_{n-k}, mu_0 = 1, mu_1 = 0.
  const int order = static_cast<int>(cumulants.size()) - 1;
  std::vector<double> mu(cumulants.size(), 0.0);
  mu[0] = 1.0;
  for (int n = 2; n <= order; ++n) {
    CompensatedSum acc;
    for (int k = 2; k <= n; ++k) {
      if (n - k == 1) {
        continue;
      }
      acc.add(binomial(n - 1, k - 1) * cumulants[static_cast<std::size_t>(k)] *
              mu[static_cast<std::size_t>(n - k)]);
    }
    mu[static_cast<std::size_t>(n)] = acc.value();
  }
  return mu;
}

InfoMoments info_moments(const SourcePmf& pmf, int max_order) {
  if (max_order < 3 || max_order > kDefaultMaxOrder) {
    throw DomainError("info_moments: max_order must lie in [3, 12]");
  }
  const auto& probs = pmf.probs();
  const auto& logs = pmf.log_probs();
  const std::size_t m = pmf.size();

  InfoMoments out;
  if (pmf.is_uniform()) {
    out.h1 = -logs.front();
  } else {
    CompensatedSum h;
    for (std::size_t x = 0; x < m; ++x) {
      h.add(-probs[x] * logs[x]);
    }
    out.h1 = h.value();
  }

  out.deviations.resize(m);
  for (std::size_t x = 0; x < m; ++x) {
    out.deviations[x] = -logs[x] - out.h1;
  }

  out.central_moments.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  out.central_moments[0] = 1.0;
  for (int j = 2; j <= max_order; ++j) {
    CompensatedSum acc;
    for (std::size_t x = 0; x < m; ++x) {
      acc.add(probs[x] * std::pow(out.deviations[x], j));
    }
    out.central_moments[static_cast<std::size_t>(j)] = acc.value();
  }

  out.cumulants = central_to_cumulants(out.central_moments);
  out.cumulants[1] = out.h1;
  out.varentropy = out.central_moments[2];
  out.third_central = out.central_moments[3];
  return out;
}

BernoulliMoments bernoulli_closed_forms(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("bernoulli_closed_forms: p must lie in (0, 1)");
  }
  const double q = 1.0 - p;
  const double l = std::log(q / p);
  const double pq = p * q;
  return {-p * std::log(p) - q * std::log(q), pq * l * l, pq * (1.0 - 2.0 * p) * l * l * l};
}

BlockMoments block_moments(const InfoMoments& moments, long long n, int max_order) {
  if (n < 1) {
    throw DomainError("block_moments: blocklength must be positive");
  }
  if (max_order < 2 || max_order > moments.max_order()) {
    throw DomainError("block_moments: order " + std::to_string(max_order) +
                      " exceeds available moments");
  }
  std::vector<double> kappa(static_cast<std::size_t>(max_order) + 1, 0.0);
  const auto scale = static_cast<double>(n);
  for (int j = 2; j <= max_order; ++j) {
    kappa[static_cast<std::size_t>(j)] = scale * moments.cumulants[static_cast<std::size_t>(j)];
  }
  return {n, cumulants_to_central(kappa)};
}

}  // namespace qabsorb
