#include "qabsorb/exact_limit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qabsorb/errors.hpp"
#include "qabsorb/numerics.hpp"

namespace qabsorb {

namespace {

bool values_merge(double a, double b) {
  return std::fabs(a - b) <= kAtomMergeTolerance * std::fmax(std::fabs(a), std::fabs(b));
}

void check_blocklength(long long n) {
  if (n < 1) {
    throw DomainError("spectrum: blocklength must be positive");
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("eps must lie in (0, 1)");
  }
}

std::vector<double> log_factorial_table(long long n) {
  std::vector<double> table(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k <= n; ++k) {
    table[static_cast<std::size_t>(k)] = log_factorial(k);
  }
  return table;
}

}  // namespace

double SpectrumAtom::prob() const { return std::exp(log_prob); }

double Spectrum::total_mass() const {
  std::vector<double> probs;
  probs.reserve(atoms.size());
  for (const auto& a : atoms) {
    probs.push_back(a.prob());
  }
  return stable_sum_by_magnitude(probs);
}

Spectrum make_spectrum(long long n, std::vector<SpectrumAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const SpectrumAtom& a, const SpectrumAtom& b) { return a.value < b.value; });
  Spectrum spec{n, {}};
  spec.atoms.reserve(atoms.size());
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() && values_merge(atoms[i].value, atoms[j].value)) {
      ++j;
    }
    if (j == i + 1) {
      spec.atoms.push_back(atoms[i]);
    } else {
      std::vector<double> logs;
      logs.reserve(j - i);
      for (std::size_t k = i; k < j; ++k) {
        logs.push_back(atoms[k].log_prob);
      }
      spec.atoms.push_back({atoms[i].value, log_sum_exp(logs)});
    }
    i = j;
  }
  return spec;
}

namespace {

// Atoms indexed by the count k of symbol 1; log_zero / log_one are the
// per-symbol log-probabilities.
Spectrum binomial_spectrum(double log_zero, double log_one, long long n) {
  if (n > kMaxBinaryBlocklength) {
    throw CapExceededError("binary_spectrum: blocklength exceeds 10^6");
  }
  const double log_n_fact = log_factorial(n);
  std::vector<SpectrumAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k <= n; ++k) {
    const double log_seq =
        static_cast<double>(n - k) * log_zero + static_cast<double>(k) * log_one;
    const double log_count = log_n_fact - log_factorial(n - k) - log_factorial(k);
    atoms.push_back({-log_seq, log_count + log_seq});
  }
  return make_spectrum(n, std::move(atoms));
}

}  // namespace

Spectrum binary_spectrum(double p, long long n) {
  check_blocklength(n);
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("binary_spectrum: p must lie in (0, 1)");
  }
  return binomial_spectrum(std::log(1.0 - p), std::log(p), n);
}

double composition_count(long long n, std::size_t m) {
  const auto parts = static_cast<long long>(m);
  return std::round(std::exp(log_factorial(n + parts - 1) - log_factorial(parts - 1) -
                             log_factorial(n)));
}

Spectrum type_class_spectrum(const SourcePmf& pmf, long long n) {
  check_blocklength(n);
  const std::size_t m = pmf.size();
  if (composition_count(n, m) > kMaxCompositions) {
    throw CapExceededError("type_class_spectrum: more than 10^7 compositions for n = " +
                           std::to_string(n));
  }
  const auto& logs = pmf.log_probs();
  const std::vector<double> log_fact = log_factorial_table(n);

  // Lexicographic walk over (k_0, ..., k_{m-1}) summing to n; the last
  // count takes whatever mass remains.
  std::vector<long long> counts(m, 0);
  std::vector<SpectrumAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(composition_count(n, m)));
  const auto emit = [&] {
    double log_seq = 0.0;
    double log_count = log_fact[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < m; ++i) {
      log_seq += static_cast<double>(counts[i]) * logs[i];
      log_count -= log_fact[static_cast<std::size_t>(counts[i])];
    }
    atoms.push_back({-log_seq, log_count + log_seq});
  };
  const auto visit = [&](const auto& self, std::size_t part, long long remaining) -> void {
    if (part + 1 == m) {
      counts[part] = remaining;
      emit();
      return;
    }
    for (long long c = 0; c <= remaining; ++c) {
      counts[part] = c;
      self(self, part + 1, remaining - c);
    }
  };
  visit(visit, 0, n);
  return make_spectrum(n, std::move(atoms));
}

Spectrum brute_force_spectrum(const SourcePmf& pmf, long long n) {
  check_blocklength(n);
  const std::size_t m = pmf.size();
  if (static_cast<double>(n) * std::log(static_cast<double>(m)) >
      std::log(kMaxBruteForceSequences) + 1e-9) {
    throw CapExceededError("brute_force_spectrum: more than 10^7 sequences");
  }
  const auto& logs = pmf.log_probs();
  const auto& probs = pmf.probs();

  // value -> accumulated probability; lookups tolerate rounding differences
  // between sequences of the same type.
  std::map<double, CompensatedSum> mass;
  std::vector<std::size_t> seq(static_cast<std::size_t>(n), 0);
  while (true) {
    double info = 0.0;
    double prob = 1.0;
    for (const std::size_t s : seq) {
      info -= logs[s];
      prob *= probs[s];
    }
    auto it = mass.lower_bound(info - kAtomMergeTolerance * info);
    if (it != mass.end() && values_merge(it->first, info)) {
      it->second.add(prob);
    } else {
      mass[info].add(prob);
    }

    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == m) {
      seq[pos] = 0;
      ++pos;
    }
    if (pos == seq.size()) {
      break;
    }
  }

  std::vector<SpectrumAtom> atoms;
  atoms.reserve(mass.size());
  for (const auto& [value, acc] : mass) {
    atoms.push_back({value, std::log(acc.value())});
  }
  return make_spectrum(n, std::move(atoms));
}

Spectrum exact_spectrum(const SourcePmf& pmf, long long n) {
  if (pmf.size() == 2) {
    check_blocklength(n);
    return binomial_spectrum(pmf.log_probs()[0], pmf.log_probs()[1], n);
  }
  return type_class_spectrum(pmf, n);
}

double spectrum_cdf(const Spectrum& spec, double level) {
  std::vector<double> probs;
  for (const auto& a : spec.atoms) {
    if (a.value > level) {
      break;
    }
    probs.push_back(a.prob());
  }
  return stable_sum_by_magnitude(probs);
}

SourceLimit exact_source_limit_detail(const Spectrum& spec, double eps) {
  check_eps(eps);
  if (spec.atoms.empty()) {
    throw DomainError("exact_source_limit: empty spectrum");
  }
  // Accumulate the upper tail from the top so masses near 1 - eps are
  // resolved from the small side: P(S_n <= a_i) >= 1 - eps  <=>  tail_i <= eps.
  const std::size_t count = spec.atoms.size();
  std::vector<double> tail_above(count, 0.0);
  CompensatedSum tail;
  for (std::size_t i = count; i-- > 0;) {
    tail_above[i] = tail.value();
    tail.add(spec.atoms[i].prob());
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (tail_above[i] <= eps) {
      return {spec.atoms[i].value, i, 1.0 - tail_above[i]};
    }
  }
  return {spec.atoms.back().value, count - 1, 1.0};
}

double exact_source_limit(const Spectrum& spec, double eps) {
  return exact_source_limit_detail(spec, eps).value;
}

double exact_q_limit(const Spectrum& spec, const SourcePmf& pmf, QParam q, double eps) {
  const CentralizedQDensity map(pmf, spec.n, q);
  return map(exact_source_limit(spec, eps));
}

Spectrum transform_spectrum(const Spectrum& spec, const std::function<double(double)>& map) {
  Spectrum out{spec.n, {}};
  out.atoms.reserve(spec.atoms.size());
  for (const auto& a : spec.atoms) {
    out.atoms.push_back({map(a.value), a.log_prob});
  }
  return out;
}

}  // namespace qabsorb
