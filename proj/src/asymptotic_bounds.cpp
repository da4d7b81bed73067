#include "qabsorb/asymptotic_bounds.hpp"

#include <cmath>
#include <limits>

#include "qabsorb/errors.hpp"
#include "qabsorb/exact_limit.hpp"
#include "qabsorb/numerics.hpp"
#include "qabsorb/q_algebra.hpp"

namespace qabsorb {

BoundInputs make_bound_inputs(const InfoMoments& moments, long long n, double eps,
                              std::optional<double> alpha_override) {
  if (n < 1) {
    throw DomainError("bound inputs: blocklength must be positive");
  }
  BoundInputs in;
  in.n = n;
  in.eps = eps;
  in.z_eps = inv_q_function(eps);
  in.h1 = moments.h1;
  in.varentropy = moments.varentropy;
  in.third_central = moments.third_central;
  in.degenerate = has_degenerate_varentropy(moments);
  if (alpha_override) {
    in.alpha = *alpha_override;
  } else if (in.degenerate) {
    in.alpha = std::numeric_limits<double>::quiet_NaN();
  } else {
    in.alpha = optimal_alpha(moments).alpha;
  }
  return in;
}

double shannon_limit(const BoundInputs& in) { return static_cast<double>(in.n) * in.h1; }

double normal_approx(const BoundInputs& in) {
  return shannon_limit(in) + std::sqrt(static_cast<double>(in.n) * in.varentropy) * in.z_eps;
}

double edgeworth_third(const BoundInputs& in) {
  if (in.degenerate) {
    throw DegenerateSourceError("edgeworth_third: varentropy is zero");
  }
  return normal_approx(in) +
         in.third_central / (6.0 * in.varentropy) * (in.z_eps * in.z_eps - 1.0);
}

double q_bound(const BoundInputs& in) {
  if (!std::isfinite(in.alpha)) {
    throw DegenerateSourceError("q_bound: alpha is undefined");
  }
  return normal_approx(in) + in.alpha * in.varentropy / 2.0 * (in.z_eps * in.z_eps - 1.0);
}

std::vector<BoundRow> bound_sweep(const SourcePmf& pmf, double eps, SweepRange range,
                                  bool include_exact, std::optional<double> alpha_override) {
  if (range.n_min < 1 || range.n_max < range.n_min || range.n_step < 1) {
    throw DomainError("bound_sweep: empty or invalid blocklength range");
  }
  const InfoMoments moments = info_moments(pmf, 3);
  std::vector<BoundRow> rows;
  for (long long n = range.n_min; n <= range.n_max; n += range.n_step) {
    const BoundInputs in = make_bound_inputs(moments, n, eps, alpha_override);
    BoundRow row;
    row.n = n;
    row.shannon = shannon_limit(in);
    row.normal = normal_approx(in);
    row.degenerate = in.degenerate;
    if (!in.degenerate) {
      row.edgeworth = edgeworth_third(in);
    }
    if (std::isfinite(in.alpha)) {
      row.q_bound = q_bound(in);
    }
    if (include_exact) {
      try {
        row.exact = exact_source_limit(exact_spectrum(pmf, n), eps);
      } catch (const CapExceededError&) {
        row.exact.reset();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qabsorb
