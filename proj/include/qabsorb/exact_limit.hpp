#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qabsorb/q_algebra.hpp"
#include "qabsorb/source_model.hpp"

namespace qabsorb {

inline constexpr long long kMaxBinaryBlocklength = 1'000'000;
inline constexpr double kMaxCompositions = 1e7;
inline constexpr double kMaxBruteForceSequences = 1e7;
inline constexpr double kAtomMergeTolerance = 1e-12;

/// One realized value of S_n (nats) and the log of its total probability.
struct SpectrumAtom {
  double value = 0.0;
  double log_prob = 0.0;

  [[nodiscard]] double prob() const;
};

/// Exact law of S_n: atoms ascending in value, near-equal values merged.
struct Spectrum {
  long long n = 0;
  std::vector<SpectrumAtom> atoms;

  [[nodiscard]] double total_mass() const;
};

/// Sorts atoms by value and merges values equal within kAtomMergeTolerance
/// (relative), combining probabilities in the log domain.
Spectrum make_spectrum(long long n, std::vector<SpectrumAtom> atoms);

/// Binomial law of S_n for a Bernoulli(p) source (P(1) = p).
Spectrum binary_spectrum(double p, long long n);

/// Number of compositions of n into m parts, C(n + m - 1, m - 1), as a double.
double composition_count(long long n, std::size_t m);

/// Exact law of S_n by iterating over every type class. Throws
/// CapExceededError above kMaxCompositions compositions.
Spectrum type_class_spectrum(const SourcePmf& pmf, long long n);

/// Exact law of S_n by visiting all m^n sequences; test oracle only.
Spectrum brute_force_spectrum(const SourcePmf& pmf, long long n);

/// Binary pmfs go through binary_spectrum, larger alphabets through type classes.
Spectrum exact_spectrum(const SourcePmf& pmf, long long n);

/// P(S_n <= level).
double spectrum_cdf(const Spectrum& spec, double level);

struct SourceLimit {
  double value = 0.0;       // L*(n, eps), nats
  std::size_t index = 0;    // achieving atom
  double cumulative = 0.0;  // P(S_n <= L*)
};

/// Smallest atom value L with P(S_n <= L) >= 1 - eps.
SourceLimit exact_source_limit_detail(const Spectrum& spec, double eps);
double exact_source_limit(const Spectrum& spec, double eps);

/// (1 - eps)-quantile of the centralized q-density; equal to the map applied
/// to L* because the map is strictly increasing.
double exact_q_limit(const Spectrum& spec, const SourcePmf& pmf, QParam q, double eps);

/// Atomwise image of a spectrum under a monotone map, probabilities kept.
Spectrum transform_spectrum(const Spectrum& spec, const std::function<double(double)>& map);

}  // namespace qabsorb
