#pragma once

#include <cstddef>
#include <vector>

#include "merge_metrics/measures.hpp"

namespace merge_metrics {

struct CouplingEntry {
  std::size_t source;  // point carrying the first marginal's mass
  std::size_t target;  // point carrying the second marginal's mass
  double mass;
};

/// Joint law of a pair (X, Y) of random points of one space, stored as its
/// positive entries. Marginals are the row and column sums.
class Coupling {
 public:
  /// Validates nonnegativity, total mass 1 (within 1e-9) and indices.
  Coupling(SpacePtr space, std::vector<CouplingEntry> entries);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<CouplingEntry>& entries() const noexcept { return entries_; }

  std::vector<double> first_marginal() const;
  std::vector<double> second_marginal() const;

  /// gamma{(x, y) : dist(x, y) > threshold}.
  double mass_beyond(double threshold) const;

  /// Largest deviation of the marginals from (p, q).
  double marginal_error(const DiscreteMeasure& p, const DiscreteMeasure& q) const;

 private:
  SpacePtr space_;
  std::vector<CouplingEntry> entries_;
};

struct OptimalCoupling {
  Coupling coupling;
  double alpha = 0.0;
};

/// Coupling minimizing the Ky-Fan objective. The flow witness at the optimal
/// Prokhorov breakpoint fixes the near-diagonal part; leftover mass is
/// completed by a northwest-corner fill over the supports.
OptimalCoupling optimal_coupling(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// min alpha >= 0 with gamma{dist > alpha} <= alpha.
double ky_fan(const Coupling& coupling);

struct PropertyARecord {
  double pi = 0.0;
  double ky_fan = 0.0;
  bool holds = true;
};

struct PropertyAReport {
  std::vector<PropertyARecord> records;
  bool passed() const;
};

/// For each coupling, compares the Prokhorov distance of its marginals with
/// its Ky-Fan value (pi <= ky_fan, up to 1e-9).
PropertyAReport property_A_check(const std::vector<Coupling>& sequence);

/// Marginals of a coupling as probability measures on its space.
DiscreteMeasure first_marginal_measure(const Coupling& coupling);
DiscreteMeasure second_marginal_measure(const Coupling& coupling);

}  // namespace merge_metrics
