#include "merge_metrics/merging_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/parallel.hpp"
#include "merge_metrics/prokhorov.hpp"
#include "merge_metrics/rng.hpp"

namespace merge_metrics {

namespace {

constexpr std::size_t kSequenceMax = 1000000;
constexpr std::size_t kQuadraticMaxN = 4096;

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string format_indices(const std::vector<std::size_t>& indices) {
  std::string s;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k > 0) s += ",";
    s += std::to_string(indices[k]);
  }
  return s;
}

std::vector<std::size_t> or_default(std::vector<std::size_t> indices, std::size_t first, std::size_t last) {
  return indices.empty() ? index_range(first, last) : indices;
}

void check_indices(const std::vector<std::size_t>& indices, std::size_t n_min, std::size_t n_max) {
  for (std::size_t n : indices) {
    if (n < n_min || n > n_max) {
      throw Error("IndexOutOfRange", "index " + std::to_string(n) + " outside [" + std::to_string(n_min) + ", " +
                                         std::to_string(n_max) + "]");
    }
  }
}

SpacePtr line_space(const std::vector<double>& xs) {
  Coordinates pts;
  for (double x : xs) pts.push_back({x});
  return make_space(MetricSpace::from_coordinates(std::move(pts), MetricKind::Euclidean));
}

TestFunction analytic_test(const std::string& name, const SpacePtr& space, bool uc) {
  return {name, named_function(name).tabulate(space), uc};
}

}  // namespace

Scenario::Scenario(std::string name, std::vector<std::pair<std::string, std::string>> params, std::size_t n_min,
                   std::size_t n_max, std::vector<std::size_t> indices, std::vector<std::string> default_metrics,
                   Generator generator)
    : name_(std::move(name)), params_(std::move(params)), n_min_(n_min), n_max_(n_max), indices_(std::move(indices)),
      default_metrics_(std::move(default_metrics)), generator_(std::move(generator)) {
  check_indices(indices_, n_min_, n_max_);
}

ScenarioInstance Scenario::instance(std::size_t n) const {
  check_indices({n}, n_min_, n_max_);
  return generator_(n);
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t n = first; n <= last; ++n) out.push_back(n);
  return out;
}

Scenario scenario_point_masses(std::vector<std::size_t> indices) {
  indices = or_default(std::move(indices), 1, 40);
  auto gen = [](std::size_t n) {
    const double x = static_cast<double>(n);
    const double d = 1.0 / x;
    const auto space = make_space(MetricSpace::from_matrix({{0.0, d}, {d, 0.0}}, Coordinates{{x}, {x + d}}));
    ScenarioInstance inst{n, point_mass(space, 0), point_mass(space, 1), {}};
    inst.tests.push_back(analytic_test("sin_quarter_pi_sq", space, false));
    inst.tests.push_back({"F1_witness", class_sup(inst.p, inst.q, FunctionClassSpec::f_one()).witness, true});
    return inst;
  };
  return Scenario("point_masses", {{"indices", format_indices(indices)}}, 1, kSequenceMax, indices,
                  {"pi", "beta", "F1"}, gen);
}

Scenario scenario_diverging_masses(std::vector<std::size_t> indices) {
  indices = or_default(std::move(indices), 1, 40);
  auto gen = [](std::size_t n) {
    const double x = static_cast<double>(n);
    const auto space = line_space({x, 2.0 * x});
    return ScenarioInstance{n, point_mass(space, 0), point_mass(space, 1), {}};
  };
  return Scenario("diverging_masses", {{"indices", format_indices(indices)}}, 1, kSequenceMax, indices,
                  {"pi", "beta", "F1"}, gen);
}

DeltaRule delta_rule_from_string(const std::string& name) {
  if (name == "inverse") return DeltaRule::Inverse;
  if (name == "inverse_square") return DeltaRule::InverseSquare;
  throw Error("InvalidDeltaRule", "unknown delta rule '" + name + "' (expected inverse or inverse_square)");
}

std::string to_string(DeltaRule rule) { return rule == DeltaRule::Inverse ? "inverse" : "inverse_square"; }

double delta_at(DeltaRule rule, std::size_t n) {
  const double x = static_cast<double>(n);
  return rule == DeltaRule::Inverse ? 1.0 / x : 1.0 / (x * x);
}

Scenario scenario_remark1(std::vector<std::size_t> indices, DeltaRule rule) {
  indices = or_default(std::move(indices), 2, 30);
  if (indices.empty()) throw Error("InvalidArgument", "remark1 needs at least one index");
  const std::size_t top = *std::max_element(indices.begin(), indices.end());
  if (top > kRemark1MaxIndex) {
    throw Error("InvalidArgument", "remark1 supports indices up to " + std::to_string(kRemark1MaxIndex));
  }
  // Balls of radius delta_n around x_n must stay disjoint from every other
  // point, which sits at distance 1.
  for (std::size_t n : indices) {
    if (n == 0 || delta_at(rule, n) > 0.5) {
      throw Error("InvalidDeltaRule", "delta_" + std::to_string(n) + " = " +
                                          (n == 0 ? std::string("inf") : format_double(delta_at(rule, n))) +
                                          " exceeds 1/2");
    }
  }
  std::vector<std::vector<double>> matrix(2 * top, std::vector<double>(2 * top, 1.0));
  for (std::size_t i = 0; i < 2 * top; ++i) matrix[i][i] = 0.0;
  for (std::size_t n = 1; n <= top; ++n) {
    // delta_n for indices below the requested ones may exceed 1/2; those
    // pairs are never used, so they are capped to keep the matrix a metric.
    const double d = std::min(delta_at(rule, n), 0.5);
    matrix[2 * (n - 1)][2 * (n - 1) + 1] = matrix[2 * (n - 1) + 1][2 * (n - 1)] = d;
  }
  const auto space = make_space(MetricSpace::from_matrix(matrix));
  std::vector<double> f(2 * top, 0.0);
  for (std::size_t n = 1; n <= top; ++n) f[2 * (n - 1)] = 1.0;
  const auto witness = FunctionOnSpace::tabulated(space, f);
  auto gen = [space, witness](std::size_t n) {
    ScenarioInstance inst{n, point_mass(space, 2 * (n - 1)), point_mass(space, 2 * (n - 1) + 1), {}};
    inst.tests.push_back({"indicator_x", witness, false});
    return inst;
  };
  return Scenario("remark1", {{"indices", format_indices(indices)}, {"delta_rule", to_string(rule)}},
                  *std::min_element(indices.begin(), indices.end()), top, indices, {"pi", "beta", "F1"}, gen);
}

Scenario scenario_tight_classical(std::vector<std::size_t> indices) {
  indices = or_default(std::move(indices), 1, 40);
  auto gen = [](std::size_t n) {
    const auto space = line_space({0.0, 1.0 / static_cast<double>(n)});
    ScenarioInstance inst{n, point_mass(space, 1), point_mass(space, 0), {}};
    inst.tests.push_back(analytic_test("bl_custom", space, true));
    inst.tests.push_back(analytic_test("sin_quarter_pi_sq", space, false));
    return inst;
  };
  return Scenario("tight_classical", {{"indices", format_indices(indices)}}, 1, kSequenceMax, indices,
                  {"pi", "beta", "F1"}, gen);
}

Law law_from_string(const std::string& name) {
  if (name == "gaussian") return Law::Gaussian;
  if (name == "rademacher") return Law::Rademacher;
  throw Error("UnknownLaw", "unknown law '" + name + "' (expected gaussian or rademacher)");
}

QuadraticForm form_from_string(const std::string& name) {
  if (name == "chain") return QuadraticForm::Chain;
  if (name == "square") return QuadraticForm::Square;
  throw Error("UnknownForm", "unknown form '" + name + "' (expected chain or square)");
}

std::string to_string(Law law) { return law == Law::Gaussian ? "gaussian" : "rademacher"; }
std::string to_string(QuadraticForm form) { return form == QuadraticForm::Chain ? "chain" : "square"; }

double quadratic_form_value(QuadraticForm form, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw Error("InvalidArgument", "quadratic forms need n >= 2");
  if (form == QuadraticForm::Chain) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) s += x[i] * x[i + 1];
    return s / std::sqrt(static_cast<double>(n - 1));
  }
  double s = 0.0;
  for (double v : x) s += v;
  const double m = static_cast<double>(n);
  return (s * s - m) / (m * std::sqrt(2.0));
}

Scenario scenario_quadratic_forms(std::vector<std::size_t> indices, std::size_t sample_size, Law law_f, Law law_g,
                                  QuadraticForm form, std::uint64_t seed) {
  indices = indices.empty() ? std::vector<std::size_t>{4, 16, 64, 256} : indices;
  if (sample_size < 1000) throw Error("InvalidArgument", "sample_size must be >= 1000");
  auto draw = [=](std::size_t n, int side) {
    Rng rng(mix_seed(seed, 2 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(side)));
    const Law law = side == 0 ? law_f : law_g;
    Coordinates values(sample_size);
    std::vector<double> x(n);
    for (std::size_t s = 0; s < sample_size; ++s) {
      for (auto& v : x) v = law == Law::Gaussian ? rng.normal() : rng.sign();
      values[s] = {quadratic_form_value(form, x)};
    }
    return empirical(values);
  };
  auto gen = [draw](std::size_t n) {
    auto [p, q] = merge_onto_union(draw(n, 0), draw(n, 1));
    return ScenarioInstance{n, std::move(p), std::move(q), {}};
  };
  return Scenario("quadratic_forms",
                  {{"indices", format_indices(indices)},
                   {"sample_size", std::to_string(sample_size)},
                   {"law_f", to_string(law_f)},
                   {"law_g", to_string(law_g)},
                   {"form", to_string(form)},
                   {"seed", std::to_string(seed)},
                   {"rng", Rng::kAlgorithm}},
                  2, kQuadraticMaxN, indices, {"beta"}, gen);
}

double IndexRecord::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  throw Error("InvalidArgument", "metric '" + name + "' was not computed");
}

std::string MergingReport::rule() const {
  return "merging at threshold t iff the last " + std::to_string(window) +
         " computed indices all have " + verdict_metric + " < t";
}

bool MergingReport::verdict(const std::string& metric, double threshold) const {
  for (const auto& v : verdicts) {
    if (v.metric == metric && v.threshold == threshold) return v.merging;
  }
  throw Error("InvalidArgument", "no verdict for " + metric + " at " + format_double(threshold));
}

namespace {

void validate_metric(const std::string& name) {
  if (name == "pi" || name == "beta") return;
  try {
    (void)FunctionClassSpec::parse(name);
  } catch (const Error&) {
    throw Error("InvalidArgument", "unknown metric '" + name + "' (expected pi, beta, BL, F1 or Feps:<eps>)");
  }
}

double evaluate_metric(const std::string& name, const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (name == "pi") {
    std::size_t support = 0;
    for (std::size_t i = 0; i < p.size(); ++i) support += (p[i] > 0.0 || q[i] > 0.0) ? 1 : 0;
    if (support > kDiagnosePiLimit) throw TooLarge(support, kDiagnosePiLimit);
    return prokhorov_distance(p, q).pi;
  }
  if (name == "beta") return beta_distance(p, q).value;
  return class_sup(p, q, FunctionClassSpec::parse(name)).value;
}

// Trailing-window test: the last `window` values are all below `threshold`.
bool trailing_below(const std::vector<double>& values, std::size_t window, double threshold) {
  const std::size_t w = std::min(window, values.size());
  for (std::size_t k = values.size() - w; k < values.size(); ++k) {
    if (!(values[k] < threshold)) return false;
  }
  return true;
}

// Some |value| in the trailing window is at or above the threshold: the
// integral fails the same rule the metric verdicts use.
bool trailing_reaches(const std::vector<double>& values, std::size_t window, double threshold) {
  const std::size_t w = std::min(window, values.size());
  for (std::size_t k = values.size() - w; k < values.size(); ++k) {
    if (std::abs(values[k]) >= threshold) return true;
  }
  return false;
}

}  // namespace

MergingReport diagnose(const Scenario& scenario, const std::vector<std::size_t>& indices,
                       const DiagnoseConfig& config) {
  if (indices.empty()) throw Error("InvalidArgument", "no indices to diagnose");
  if (config.window == 0) throw Error("InvalidArgument", "window must be positive");
  if (config.thresholds.empty()) throw Error("InvalidArgument", "at least one threshold is needed");
  for (double t : config.thresholds) {
    if (!std::isfinite(t) || t <= 0.0) throw Error("InvalidArgument", "thresholds must be positive and finite");
  }
  check_indices(indices, scenario.n_min(), scenario.n_max());
  const std::vector<std::string> metrics = config.metrics.empty() ? scenario.default_metrics() : config.metrics;
  for (const auto& m : metrics) validate_metric(m);

  MergingReport report;
  report.scenario = scenario.name();
  report.params = scenario.params();
  report.metrics = metrics;
  report.thresholds = config.thresholds;
  report.window = config.window;
  report.records.resize(indices.size());

  parallel_for(indices.size(), [&](std::size_t k) {
    const ScenarioInstance inst = scenario.instance(indices[k]);
    IndexRecord& rec = report.records[k];
    rec.n = inst.n;
    for (const auto& m : metrics) rec.metrics.emplace_back(m, evaluate_metric(m, inst.p, inst.q));
    const SignedMeasure psi = signed_diff(inst.p, inst.q);
    for (const auto& t : inst.tests) rec.integrals.push_back({t.label, integrate(t.f, psi), t.uniformly_continuous});
  });

  for (const auto& rec : report.records) {
    for (const auto& [name, value] : rec.metrics) {
      if (!std::isfinite(value)) throw Error("NumericalFailure", name + " is not finite at n = " + std::to_string(rec.n));
    }
  }

  report.verdict_metric = std::find(metrics.begin(), metrics.end(), "pi") != metrics.end() ? "pi" : metrics.front();
  for (const auto& m : metrics) {
    std::vector<double> series;
    for (const auto& rec : report.records) series.push_back(rec.metric(m));
    for (double t : config.thresholds) report.verdicts.push_back({m, t, trailing_below(series, config.window, t)});
  }
  for (double t : config.thresholds) {
    const bool headline = report.verdict(report.verdict_metric, t);
    report.merging.push_back(headline);
    for (const auto& m : metrics) report.coherent = report.coherent && report.verdict(m, t) == headline;
    if (!headline) continue;
    const auto& first = report.records.front().integrals;
    for (std::size_t j = 0; j < first.size(); ++j) {
      if (first[j].uniformly_continuous) continue;
      std::vector<double> series;
      for (const auto& rec : report.records) series.push_back(rec.integrals[j].value);
      if (trailing_reaches(series, config.window, t)) report.flags.push_back({first[j].label, t});
    }
  }
  return report;
}

std::vector<std::string> scenario_names() {
  return {"point_masses", "diverging_masses", "remark1", "tight_classical", "quadratic_forms"};
}

Scenario make_scenario(const std::string& name, const ScenarioOptions& options) {
  if (name == "point_masses") return scenario_point_masses(options.indices);
  if (name == "diverging_masses") return scenario_diverging_masses(options.indices);
  if (name == "remark1") return scenario_remark1(options.indices, delta_rule_from_string(options.delta_rule));
  if (name == "tight_classical") return scenario_tight_classical(options.indices);
  if (name == "quadratic_forms") {
    return scenario_quadratic_forms(options.indices, options.sample_size, law_from_string(options.law_f),
                                    law_from_string(options.law_g), form_from_string(options.form), options.seed);
  }
  throw Error("UnknownScenario", "unknown scenario '" + name + "'");
}

}  // namespace merge_metrics
