#pragma once

#include <cstddef>

#include "merge_metrics/flow.hpp"
#include "merge_metrics/measures.hpp"

namespace merge_metrics {

struct ProkhorovResult {
  double pi = 0.0;
  /// Threshold at which the optimum is attained.
  double breakpoint = 0.0;
  /// Mass transportable within `breakpoint`.
  double transported_mass = 0.0;
};

/// Largest mass a coupling of (p, q) can place on pairs at distance <= eps.
double max_transportable_mass(const DiscreteMeasure& p, const DiscreteMeasure& q, double eps);

/// Max-flow witness behind `max_transportable_mass`, expressed in space
/// indices (FlowArc::source indexes p's points, FlowArc::sink q's points).
FlowResult transport_within(const DiscreteMeasure& p, const DiscreteMeasure& q, double eps);

enum class ProkhorovMethod {
  /// Exact scan over the distances between the two supports.
  BreakpointScan,
  /// Bisection on eps to 1e-12; kept as an independent cross-check.
  Bisection,
};

/// Levy-Prokhorov distance. The scan evaluates
///   min over d in {0} U {dist(i, j) : i in supp p, j in supp q}
///     of max(d, 1 - m(d)),
/// which is exact because m(eps) only changes at those distances. Ties are
/// resolved towards the smallest breakpoint.
ProkhorovResult prokhorov_distance(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                   ProkhorovMethod method = ProkhorovMethod::BreakpointScan);

struct ProkhorovOracleResult {
  /// inf eps with p(A) <= q(A^eps) + eps for every subset A.
  double pi = 0.0;
  /// Same infimum with the measures exchanged: q(A) <= p(A^eps) + eps.
  double pi_swapped = 0.0;
  /// Infimum for the neighborhood on the other side, p(A^eps) <= q(A) + eps.
  /// A singleton A = {x} with q(x) = 0 forces eps >= p(A^eps) here, so two
  /// distinct point masses always score 1; reported for comparison only.
  double pi_transposed = 0.0;
  /// |pi - pi_swapped| <= 1e-9: the two one-sided conditions coincide.
  bool directions_agree = true;
  /// |pi - pi_transposed| <= 1e-9.
  bool transposed_agrees = true;
};

inline constexpr std::size_t kOracleSupportLimit = 14;

/// Brute-force closed-set oracle. Enumerates every subset of the combined
/// support (at most kOracleSupportLimit points, else TooLarge) and tests the
/// candidate thresholds: all cross-support distances, and every deficit
/// max_A p(A) - q(A^d) attained at those distances.
ProkhorovOracleResult prokhorov_oracle(const DiscreteMeasure& p, const DiscreteMeasure& q);

}  // namespace merge_metrics
