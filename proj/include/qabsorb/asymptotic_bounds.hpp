#pragma once

#include <optional>
#include <vector>

#include "qabsorb/source_model.hpp"

namespace qabsorb {

struct BoundInputs {
  long long n = 1;
  double eps = 0.01;
  double z_eps = 0.0;  // Q^{-1}(eps)
  double h1 = 0.0;
  double varentropy = 0.0;
  double third_central = 0.0;
  double alpha = 0.0;
  /// V is numerically zero; edgeworth_third refuses such inputs.
  bool degenerate = false;
};

/// Builds the inputs for blocklength n. alpha defaults to T / (3 V^2); for a
/// degenerate source without an override alpha is left NaN.
BoundInputs make_bound_inputs(const InfoMoments& moments, long long n, double eps,
                              std::optional<double> alpha_override = std::nullopt);

struct BoundRow {
  long long n = 0;
  double shannon = 0.0;
  double normal = 0.0;
  std::optional<double> edgeworth;  // empty for degenerate sources
  std::optional<double> q_bound;    // empty when alpha is undefined
  std::optional<double> exact;      // empty when not requested or over the cap
  bool degenerate = false;
};

/// n H1
double shannon_limit(const BoundInputs& in);

/// n H1 + sqrt(n V) Z_eps
double normal_approx(const BoundInputs& in);

/// Cornish-Fisher third-order form normal + (T / (6V)) (Z_eps^2 - 1).
/// Throws DegenerateSourceError when V is ~0.
double edgeworth_third(const BoundInputs& in);

/// normal + (alpha V / 2) (Z_eps^2 - 1)
double q_bound(const BoundInputs& in);

struct SweepRange {
  long long n_min = 20;
  long long n_max = 200;
  long long n_step = 1;
};

std::vector<BoundRow> bound_sweep(const SourcePmf& pmf, double eps, SweepRange range,
                                  bool include_exact,
                                  std::optional<double> alpha_override = std::nullopt);

}  // namespace qabsorb
