#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace merge_metrics {

struct SelftestSuite {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// First failing case, empty when the suite passed.
  std::string detail;

  bool passed() const noexcept { return failures == 0; }
};

struct SelftestReport {
  std::uint64_t seed = 0;
  std::vector<SelftestSuite> suites;

  bool passed() const noexcept;
};

/// Runs the invariant suites on seeded random instances: scan vs oracle pi,
/// coupling alpha vs pi with exact marginals, pi <= 2 sqrt(beta), two-point
/// closed forms, the modulus/truncation/indicator/set-distance inequalities, the
/// coupling tail bound, and the built-in scenario verdicts. `cases` scales
/// the random suites.
SelftestReport run_selftest(std::uint64_t seed = 1, std::size_t cases = 200);

}  // namespace merge_metrics
