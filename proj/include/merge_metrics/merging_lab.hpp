#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "merge_metrics/function.hpp"
#include "merge_metrics/measures.hpp"

namespace merge_metrics {

struct TestFunction {
  std::string label;
  FunctionOnSpace f;  // tabulated on the instance space
  bool uniformly_continuous = true;
};

struct ScenarioInstance {
  std::size_t n = 0;
  DiscreteMeasure p;
  DiscreteMeasure q;
  std::vector<TestFunction> tests;
};

/// A sequence (P_n, Q_n) over indices n_min..n_max. Generators are pure:
/// the same parameters give the same instance for every call.
class Scenario {
 public:
  using Generator = std::function<ScenarioInstance(std::size_t)>;

  Scenario(std::string name, std::vector<std::pair<std::string, std::string>> params, std::size_t n_min,
           std::size_t n_max, std::vector<std::size_t> indices, std::vector<std::string> default_metrics,
           Generator generator);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::pair<std::string, std::string>>& params() const noexcept { return params_; }
  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }
  /// Indices the scenario was requested with.
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const std::vector<std::string>& default_metrics() const noexcept { return default_metrics_; }

  /// Throws IndexOutOfRange outside [n_min, n_max].
  ScenarioInstance instance(std::size_t n) const;

 private:
  std::string name_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::size_t n_min_;
  std::size_t n_max_;
  std::vector<std::size_t> indices_;
  std::vector<std::string> default_metrics_;
  Generator generator_;
};

/// first..last inclusive.
std::vector<std::size_t> index_range(std::size_t first, std::size_t last);

/// P_n = delta_n, Q_n = delta_{n + 1/n} on a two-point space whose distance
/// is stored as exactly 1/n (coordinates n and n + 1/n are attached for the
/// analytic test functions). Tests: sin_quarter_pi_sq (not UC) and the F1
/// witness.
Scenario scenario_point_masses(std::vector<std::size_t> indices);

/// P_n = delta_n, Q_n = delta_{2n} on the real line.
Scenario scenario_diverging_masses(std::vector<std::size_t> indices);

enum class DeltaRule { Inverse, InverseSquare };
DeltaRule delta_rule_from_string(const std::string& name);
std::string to_string(DeltaRule rule);
double delta_at(DeltaRule rule, std::size_t n);

/// Explicit matrix on x_1, y_1, ..., x_N, y_N (N = largest index):
/// d(x_i, y_i) = delta_i, every other distinct pair at distance 1.
/// P_n = delta_{x_n}, Q_n = delta_{y_n}; test f = 1 on the x's, 0 on the y's
/// (not UC). Throws InvalidDeltaRule when some delta_n > 1/2, and
/// InvalidArgument for N > kRemark1MaxIndex.
inline constexpr std::size_t kRemark1MaxIndex = 500;
Scenario scenario_remark1(std::vector<std::size_t> indices, DeltaRule rule = DeltaRule::Inverse);

/// Q_n = delta_0, P_n = delta_{1/n} on the real line. Tests: bl_custom and
/// sin_quarter_pi_sq.
Scenario scenario_tight_classical(std::vector<std::size_t> indices);

enum class Law { Gaussian, Rademacher };
enum class QuadraticForm { Chain, Square };
Law law_from_string(const std::string& name);                 // UnknownLaw
QuadraticForm form_from_string(const std::string& name);      // UnknownForm
std::string to_string(Law law);
std::string to_string(QuadraticForm form);

/// Normalized form of x_1..x_n:
///   chain:  (x_1 x_2 + ... + x_{n-1} x_n) / sqrt(n - 1)
///   square: ((x_1 + ... + x_n)^2 - n) / (n sqrt 2)
double quadratic_form_value(QuadraticForm form, const std::vector<double>& x);

/// For each n: sample_size draws of the form under law_f and under law_g,
/// as two empirical measures on one real-line space (union of atoms). The
/// stream for (n, side) is Rng(mix_seed(seed, 2n + side)), side 0 for F.
/// Requires sample_size >= 1000 and n >= 2.
Scenario scenario_quadratic_forms(std::vector<std::size_t> indices, std::size_t sample_size, Law law_f, Law law_g,
                                  QuadraticForm form, std::uint64_t seed);

struct DiagnoseConfig {
  /// "pi", "beta", or a class label ("F1", "Feps:<eps>", "BL"). Empty means
  /// the scenario's defaults.
  std::vector<std::string> metrics;
  std::vector<double> thresholds{0.05};
  std::size_t window = 5;
};

struct TestIntegral {
  std::string label;
  double value = 0.0;
  bool uniformly_continuous = true;
};

struct IndexRecord {
  std::size_t n = 0;
  std::vector<std::pair<std::string, double>> metrics;  // config order
  std::vector<TestIntegral> integrals;

  /// Throws InvalidArgument for a metric that was not computed.
  double metric(const std::string& name) const;
};

struct MetricVerdict {
  std::string metric;
  double threshold = 0.0;
  bool merging = false;
};

/// A non-UC test integral with |value| >= threshold somewhere in the
/// trailing window (so it fails the verdict rule) while the headline verdict
/// says merging.
struct NonUcFlag {
  std::string label;
  double threshold = 0.0;
};

struct MergingReport {
  std::string scenario;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> metrics;
  std::vector<double> thresholds;
  std::size_t window = 0;
  std::vector<IndexRecord> records;
  std::vector<MetricVerdict> verdicts;  // metric-major, threshold-minor
  /// Metric the headline verdict is read from: pi when computed, otherwise
  /// the first metric.
  std::string verdict_metric;
  std::vector<bool> merging;  // headline verdict per threshold
  /// All metrics give the same verdict at every threshold.
  bool coherent = true;
  std::vector<NonUcFlag> flags;

  /// Human-readable statement of the verdict rule.
  std::string rule() const;
  bool verdict(const std::string& metric, double threshold) const;
};

/// Support size above which pi is refused in diagnose (TooLarge).
inline constexpr std::size_t kDiagnosePiLimit = 2048;

/// Evaluates the metrics and test integrals at each index (in parallel,
/// assembled in index order). A metric verdict at threshold t is "merging"
/// iff its last min(window, #indices) values are all < t. Throws
/// InvalidArgument for unknown metrics, empty index lists or window 0, and
/// IndexOutOfRange for indices outside the scenario.
MergingReport diagnose(const Scenario& scenario, const std::vector<std::size_t>& indices,
                       const DiagnoseConfig& config = {});

/// Names accepted by make_scenario.
std::vector<std::string> scenario_names();

struct ScenarioOptions {
  std::vector<std::size_t> indices;  // empty: scenario default
  std::uint64_t seed = 42;
  std::size_t sample_size = 20000;
  std::string law_f = "gaussian";
  std::string law_g = "rademacher";
  std::string form = "chain";
  std::string delta_rule = "inverse";
};

/// Builds a scenario by name: point_masses, diverging_masses, remark1,
/// tight_classical, quadratic_forms. Throws UnknownScenario.
Scenario make_scenario(const std::string& name, const ScenarioOptions& options);

}  // namespace merge_metrics
