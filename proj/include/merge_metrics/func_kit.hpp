#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "merge_metrics/function.hpp"
#include "merge_metrics/measures.hpp"
#include "merge_metrics/metric_space.hpp"

namespace merge_metrics {

/// sup |f(x) - f(y)| over pairs with dist(x, y) <= h.
double empirical_modulus(const FunctionOnSpace& f, double h);

/// omega_f evaluated at every realized distance of f's space.
struct ModulusProfile {
  std::vector<double> distances;  // ascending, distinct, positive
  std::vector<double> omega;      // omega_f(distances[k])
  /// Pair realizing omega[k].
  std::vector<std::pair<std::size_t, std::size_t>> witness;

  /// omega_f(h) for any h >= 0 (step function between realized distances).
  double at(double h) const;
};

ModulusProfile modulus_profile(const FunctionOnSpace& f);

/// f on K, f (1 - dist(x, K) / t) on K^t \ K, 0 elsewhere.
FunctionOnSpace truncate_f(const FunctionOnSpace& f, const PointSet& set, double t);

/// 1 on K, 1 - dist(x, K) / eps on K^eps \ K, 0 elsewhere.
FunctionOnSpace smoothed_indicator(const PointSet& set, double eps);

FunctionOnSpace pointwise_product(const FunctionOnSpace& f, const FunctionOnSpace& g);
FunctionOnSpace pointwise_max(const FunctionOnSpace& f, const FunctionOnSpace& g);
FunctionOnSpace pointwise_min(const FunctionOnSpace& f, const FunctionOnSpace& g);

struct InequalityViolation {
  std::string inequality;
  double h = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome of checking, at every realized distance h:
///   omega_{fg}(h)    <= ||g|| omega_f(h) + ||f|| omega_g(h)
///   omega_{f v g}(h) <= max(omega_f(h), omega_g(h))
///   omega_{f ^ g}(h) <= max(omega_f(h), omega_g(h))
struct ModulusAlgebraReport {
  bool product_holds = true;
  bool max_holds = true;
  bool min_holds = true;
  std::optional<InequalityViolation> violation;

  bool passed() const { return product_holds && max_holds && min_holds; }
};

ModulusAlgebraReport modulus_algebra_check(const FunctionOnSpace& f, const FunctionOnSpace& g);

/// Outcome of checking ||f_K^(t)|| <= ||f|| and, at every realized h,
///   omega_{f_K^(t)}(h) <= omega_f(h) + ||f|| h / t.
struct TruncationReport {
  bool sup_norm_holds = true;
  bool modulus_holds = true;
  std::optional<InequalityViolation> violation;

  bool passed() const { return sup_norm_holds && modulus_holds; }
};

TruncationReport truncation_modulus_bound(const FunctionOnSpace& f, const PointSet& set, double t);

/// Image measure p o f^{-1} on the real line (euclidean), atoms at the
/// distinct values f takes on the support of p, ascending.
DiscreteMeasure pushforward(const DiscreteMeasure& p, const FunctionOnSpace& f);

/// Pushforwards of p and q onto one common image space.
std::pair<DiscreteMeasure, DiscreteMeasure> pushforward_pair(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q,
                                                             const FunctionOnSpace& f);

}  // namespace merge_metrics
