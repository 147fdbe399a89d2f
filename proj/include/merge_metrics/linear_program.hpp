#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace merge_metrics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// maximize objective . x  subject to  rows[r] . x <= rhs[r]  and
/// lower[j] <= x[j] <= upper[j]. Empty `lower` means all zeros, empty `upper`
/// means all +inf; either bound of a variable may be infinite.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t variables() const noexcept { return objective.size(); }

  /// Appends rows[r] . x <= bound.
  void add_row(std::vector<double> coeffs, double bound) {
    rows.push_back(std::move(coeffs));
    rhs.push_back(bound);
  }
};

struct LpSolution {
  double optimum = 0.0;
  std::vector<double> witness;
  std::size_t iterations = 0;
};

/// Dense two-phase simplex. Entering columns follow the largest reduced cost;
/// a run of degenerate pivots switches to Bland's rule, which cannot cycle,
/// until the objective moves again. Pivoting is deterministic, so
/// degenerate programs always return the same witness. The iteration cap is
/// 10 * (variables + constraints)^2 of the standard-form program.
///
/// Right-hand sides are relaxed by about 1e-9 (per-row jitter) during the
/// primal phases, then restored exactly and repaired with dual simplex
/// pivots. The tableau is rebuilt from the original rows every 4m + 64
/// pivots and before a result is returned.
///
/// Throws MalformedProblem, Infeasible, Unbounded or IterationLimit.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace merge_metrics
