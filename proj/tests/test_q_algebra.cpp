#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qabsorb/errors.hpp"
#include "qabsorb/exact_limit.hpp"
#include "qabsorb/numerics.hpp"
#include "qabsorb/q_algebra.hpp"
#include "test_support.hpp"

using namespace qabsorb;
using qabsorb::testing::rel_close;

TEST_CASE("ln_q examples") {
  for (const double q : {-1.0, 0.0, 0.5, 0.999, 1.0, 1.5, 3.0}) {
    CHECK(ln_q(1.0, QParam::from_q(q)) == 0.0);
  }
  CHECK(ln_q(2.0, QParam::from_q(0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ln_q(4.0, QParam::from_q(0.5)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ln_q(std::numbers::e, QParam::identity()) == 1.0);
  // q = 2: (x^{-1} - 1) / (-1) = 1 - 1/x
  CHECK(ln_q(4.0, QParam::from_q(2.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(ln_q(0.0, QParam::from_q(0.5)), DomainError);
  CHECK_THROWS_AS(ln_q(-2.0, QParam::identity()), DomainError);
}

TEST_CASE("ln_q takes the limit branch below the threshold") {
  const QParam tiny = QParam::from_one_minus_q(1e-15);
  CHECK(tiny.is_limit());
  CHECK(ln_q(10.0, tiny) == std::log(10.0));
  const QParam small = QParam::from_one_minus_q(1e-13);
  CHECK_FALSE(small.is_limit());
  CHECK(ln_q(10.0, small) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("ln_q continuity in q near 1") {
  // ln_q x - ln x = (e^{dy} - 1 - dy) / d with y = ln x, d = 1 - q, bounded by
  // |d| y^2 e^{|dy|} / 2. The flat 0.6 |d| y^2 form holds while |dy| <= 0.5.
  bool lagrange = true;
  bool flat = true;
  for (int i = 0; i <= 120; ++i) {
    const double x = std::pow(10.0, -6.0 + 12.0 * i / 120.0);
    const double y = std::log(x);
    for (int j = -20; j <= 20; ++j) {
      const QParam q = QParam::from_q(1.0 + 0.1 * j / 20.0);
      const double d = q.one_minus_q;
      const double gap = std::fabs(ln_q(x, q) - y);
      lagrange = lagrange && gap <= 0.5 * std::fabs(d) * y * y * std::exp(std::fabs(d * y)) + 1e-14;
      if (std::fabs(d * y) <= 0.5) {
        flat = flat && gap <= 0.6 * std::fabs(d) * y * y + 1e-15;
      }
    }
  }
  CHECK(lagrange);
  CHECK(flat);
}

TEST_CASE("tsallis_entropy") {
  CHECK(tsallis_entropy(SourcePmf::uniform(4), QParam::from_q(0.5)) ==
        doctest::Approx(2.0).epsilon(1e-15));
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  CHECK(tsallis_entropy(b, QParam::identity()) == info_moments(b, 3).h1);
  // mpmath: (1 - 0.11^0.9 - 0.89^0.9) / (0.9 - 1)
  CHECK(tsallis_entropy(b, QParam::from_q(0.9)) ==
        doctest::Approx(0.37600369401507148).epsilon(1e-14));
  // direct (1 - sum p^q)/(q - 1) as a second route
  for (const double q : {0.3, 0.9, 1.2, 2.0}) {
    const double direct = (1.0 - std::pow(0.11, q) - std::pow(0.89, q)) / (q - 1.0);
    CHECK(tsallis_entropy(b, QParam::from_q(q)) == doctest::Approx(direct).epsilon(1e-13));
  }
  const InfoMoments m = info_moments(b, 3);
  const double d = 0.1;
  const double residual =
      std::fabs(tsallis_entropy(b, QParam::from_q(0.9)) - q_entropy_expansion(m, QParam::from_q(0.9)));
  // remainder (1-q)^2/6 E[I^3] e^{|1-q| max I}
  double third = 0.0;
  double imax = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    const double info = -b.log_probs()[x];
    third += b.prob(x) * info * info * info;
    imax = std::fmax(imax, info);
  }
  CHECK(residual <= d * d / 6.0 * third * std::exp(d * imax));
}

TEST_CASE("q_entropy_expansion") {
  const InfoMoments b = info_moments(SourcePmf::bernoulli(0.11), 3);
  CHECK(q_entropy_expansion(b, QParam::identity()) == b.h1);
  CHECK(q_entropy_expansion(b, QParam::from_q(0.99)) ==
        doctest::Approx(0.34925540289695806).epsilon(1e-14));
  const InfoMoments u = info_moments(SourcePmf::uniform(5), 3);
  const double lm = std::log(5.0);
  CHECK(q_entropy_expansion(u, QParam::from_q(0.8)) ==
        doctest::Approx(lm + 0.1 * lm * lm).epsilon(1e-14));
}

TEST_CASE("expansion residual is second order in 1 - q") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const SourcePmf pmf = qabsorb::testing::random_pmf(rng, 2 + trial % 4);
    const InfoMoments m = info_moments(pmf, 3);
    double lo = INFINITY;
    double hi = 0.0;
    for (const double d : {1e-2, 1e-3, 1e-4}) {
      const QParam q = QParam::from_one_minus_q(d);
      const double ratio = std::fabs(tsallis_entropy(pmf, q) - q_entropy_expansion(m, q)) / (d * d);
      lo = std::fmin(lo, ratio);
      hi = std::fmax(hi, ratio);
    }
    CHECK(hi / lo < 3.0);
  }
}

TEST_CASE("block Tsallis entropy follows the nH1 + (1-q)/2 (nV + n^2 H1^2) expansion") {
  const SourcePmf pmf({0.2, 0.3, 0.5});
  const InfoMoments m = info_moments(pmf, 3);
  for (long long n = 1; n <= 10; ++n) {
    const Spectrum spec = type_class_spectrum(pmf, n);
    const auto nn = static_cast<double>(n);
    double ratios[2];
    int idx = 0;
    for (const double d : {1e-2, 1e-3}) {
      const QParam q = QParam::from_one_minus_q(d);
      CompensatedSum hq;
      for (const auto& a : spec.atoms) {
        hq.add(a.prob() * ln_q_of_exp(a.value, q));
      }
      const double expansion =
          nn * m.h1 + 0.5 * d * (nn * m.varentropy + nn * nn * m.h1 * m.h1);
      ratios[idx++] = std::fabs(hq.value() - expansion) / (d * d);
    }
    CHECK(ratios[0] / ratios[1] < 3.0);
    CHECK(ratios[1] / ratios[0] < 3.0);
  }
}

TEST_CASE("q_info_density") {
  CHECK(q_info_density(0.25, QParam::identity()) == doctest::Approx(std::log(4.0)));
  for (const double q : {0.2, 1.0, 1.7}) {
    CHECK(q_info_density(1.0, QParam::from_q(q)) == 0.0);
  }
  CHECK(q_info_density(0.25, QParam::from_q(0.5)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(q_info_density(0.0, QParam::identity()), DomainError);
  // 1/P overflows a double here; the log-domain path does not
  CHECK(q_info_density(1e-320, QParam::identity()) ==
        doctest::Approx(-std::log(1e-320)).epsilon(1e-12));
}

TEST_CASE("mgf_fluctuation") {
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  CHECK(mgf_fluctuation(b, 7, 0.0) == 1.0);
  // sum p^0 = 2 so M = 2 exp(-H1); mpmath 1.4142959474662895
  CHECK(mgf_fluctuation(b, 1, 1.0) == doctest::Approx(1.4142959474662895).epsilon(1e-14));
  CHECK(mgf_fluctuation(b, 5, 0.3) ==
        doctest::Approx(std::pow(mgf_fluctuation(b, 1, 0.3), 5)).epsilon(1e-13));
  CHECK_THROWS_AS(mgf_fluctuation(b, 1'000'000, 1.0), OverflowError);
  CHECK_THROWS_AS(mgf_fluctuation(b, 0, 0.1), DomainError);
}

TEST_CASE("mgf_fluctuation small-theta series") {
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  const InfoMoments m = info_moments(b, 4);
  const long long n = 30;
  const BlockMoments block = block_moments(m, n, 4);
  for (const double theta : {1e-2, 3e-3, 1e-3}) {
    const double series = 1.0 + theta * theta * block.central(2) / 2.0 +
                          theta * theta * theta * block.central(3) / 6.0;
    const double fourth = std::pow(theta, 4) * block.central(4) / 24.0;
    CHECK(std::fabs(mgf_fluctuation(b, n, theta) - series) <= 2.0 * fourth);
  }
}

TEST_CASE("centralized_q_density limit and Jensen sign") {
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  const double h1 = info_moments(b, 3).h1;
  CHECK(centralized_q_density(12.5, b, 9, QParam::identity()) == 12.5);
  // w = 0 leaves nH1 + (1 - M)/(1-q) with M >= 1, so the sign follows 1 - q.
  for (const double d : {0.3, 0.01}) {
    CHECK(centralized_q_density(20.0 * h1, b, 20, QParam::from_one_minus_q(d)) <= 20.0 * h1);
  }
  for (const double d : {-0.01, -0.3}) {
    CHECK(centralized_q_density(20.0 * h1, b, 20, QParam::from_one_minus_q(d)) >= 20.0 * h1);
  }
}

TEST_CASE("centralized_q_density conserves n H1 over the exact spectrum") {
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  const double h1 = info_moments(b, 3).h1;
  for (const long long n : {1LL, 5LL, 20LL, 100LL, 200LL}) {
    const Spectrum spec = binary_spectrum(0.11, n);
    for (const double d : {-0.5, -0.1, -1e-3, 1e-6, 1e-3, 0.1, 0.5}) {
      const CentralizedQDensity map(b, n, QParam::from_one_minus_q(d));
      CompensatedSum mean;
      for (const auto& a : spec.atoms) {
        mean.add(a.prob() * map(a.value));
      }
      const double target = static_cast<double>(n) * h1;
      CHECK(std::fabs(mean.value() - target) <= 1e-9 * target);
    }
  }
}

TEST_CASE("centralized_q_density is strictly increasing") {
  const SourcePmf pmf({0.2, 0.3, 0.5});
  for (const double d : {-0.2, 0.01, 0.2}) {
    const CentralizedQDensity map(pmf, 40, QParam::from_one_minus_q(d));
    double prev = map(0.0);
    bool increasing = true;
    for (int i = 1; i <= 2000; ++i) {
      const double cur = map(80.0 * i / 2000.0);
      increasing = increasing && cur > prev;
      prev = cur;
    }
    CHECK(increasing);
  }
}

TEST_CASE("fluctuation_term examples") {
  const InfoMoments m = info_moments(SourcePmf::bernoulli(0.11), 6);
  const long long n = 50;
  const BlockMoments block = block_moments(m, n, 6);
  const QParam q = QParam::from_one_minus_q(0.02);
  const double nv = block.central(2);
  CHECK(std::fabs(fluctuation_term(std::sqrt(nv), q, 2, block)) <= 1e-15 * nv);
  CHECK(fluctuation_term(3.0, q, 2, block) ==
        doctest::Approx(0.01 * (9.0 - n * m.varentropy)).epsilon(1e-14));
  CHECK(fluctuation_term(3.0, q, 3, block) ==
        doctest::Approx(0.02 * 0.02 / 6.0 * (27.0 - n * m.third_central)).epsilon(1e-14));
  CHECK_THROWS_AS(fluctuation_term(1.0, q, 1, block), DomainError);
  CHECK_THROWS_AS(fluctuation_term(1.0, q, 7, block), DomainError);
}

TEST_CASE("truncated expansion obeys the Taylor remainder bound") {
  // The centralized map subtracts the full MGF, so the remainder carries an
  // expectation part besides the pointwise one:
  // |R| <= |d|^K (|w|^{K+1} e^{|dw|} + E[|W|^{K+1} e^{|dW|}]) / (K+1)!
  const SourcePmf b = SourcePmf::bernoulli(0.11);
  const InfoMoments m = info_moments(b, 6);
  for (const long long n : {10LL, 40LL}) {
    const Spectrum spec = binary_spectrum(0.11, n);
    const double n_h1 = static_cast<double>(n) * m.h1;
    for (const double d : {-0.05, 0.01, 0.05}) {
      const QParam q = QParam::from_one_minus_q(d);
      const CentralizedQDensity map(b, n, q);
      for (int kmax = 2; kmax <= 5; ++kmax) {
        const BlockMoments block = block_moments(m, n, kmax);
        double factorial = 1.0;
        for (int j = 2; j <= kmax + 1; ++j) {
          factorial *= j;
        }
        double expect_part = 0.0;
        for (const auto& a : spec.atoms) {
          const double w = a.value - n_h1;
          expect_part += a.prob() * std::pow(std::fabs(w), kmax + 1) * std::exp(std::fabs(d * w));
        }
        for (const auto& a : spec.atoms) {
          const double w = a.value - n_h1;
          const double diff =
              std::fabs(map(a.value) - truncated_fluctuation_expansion(w, n_h1, q, kmax, block));
          const double bound =
              std::pow(std::fabs(d), kmax) *
              (std::pow(std::fabs(w), kmax + 1) * std::exp(std::fabs(d * w)) + expect_part) /
              factorial;
          CHECK(diff <= bound + 1e-12 * n_h1);
        }
      }
    }
  }
}

TEST_CASE("scaling_q") {
  CHECK(scaling_q({0.0}, 17).q == 1.0);
  CHECK(scaling_q({0.0}, 17).is_limit());
  CHECK(scaling_q({1.27026}, 100).one_minus_q == doctest::Approx(0.0127026).epsilon(1e-15));
  for (const long long n : {1LL, 10LL, 1000LL, 1000000LL}) {
    CHECK(scaling_q({1.27026}, n).one_minus_q * static_cast<double>(n) ==
          doctest::Approx(1.27026).epsilon(1e-15));
  }
  CHECK_THROWS_AS(scaling_q({1.0}, 0), DomainError);
}

TEST_CASE("optimal_alpha") {
  CHECK_THROWS_AS(optimal_alpha(info_moments(SourcePmf::bernoulli(0.5), 3)),
                  DegenerateSourceError);
  CHECK_THROWS_AS(optimal_alpha(info_moments(SourcePmf::uniform(6), 3)), DegenerateSourceError);
  const InfoMoments b = info_moments(SourcePmf::bernoulli(0.11), 3);
  // mpmath: T / (3 V^2) = 1.27025349958056886...
  CHECK(optimal_alpha(b).alpha == doctest::Approx(1.2702534995805689).epsilon(1e-13));
  CHECK(std::fabs(optimal_alpha(b).alpha - 0.69788 / (3.0 * 0.4279397 * 0.4279397)) < 1e-4);
  // two equally likely information values ln 2 and ln 4: T = 0, V > 0
  const InfoMoments sym = info_moments(SourcePmf({0.25, 0.5, 0.25}), 3);
  CHECK(sym.varentropy > 0.1);
  CHECK(std::fabs(optimal_alpha(sym).alpha) <= 1e-14);

  std::vector<double> probs{0.3};
  for (int i = 0; i < 10; ++i) {
    probs.push_back(0.07);
  }
  probs.back() = 1.0 - 0.3 - 0.07 * 9;
  CHECK(optimal_alpha(info_moments(SourcePmf(probs), 3)).alpha < 0.0);
}
