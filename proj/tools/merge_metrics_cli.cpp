#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "merge_metrics/coupling.hpp"
#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/func_kit.hpp"
#include "merge_metrics/io.hpp"
#include "merge_metrics/merging_lab.hpp"
#include "merge_metrics/parallel.hpp"
#include "merge_metrics/prokhorov.hpp"
#include "merge_metrics/rng.hpp"
#include "merge_metrics/selftest.hpp"

namespace mm = merge_metrics;
using mm::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 2;
constexpr int kExitUsage = 64;

const char* const kExitCodes =
    "Exit codes: 0 success, 2 computational or input failure (JSON error on stdout), 64 usage error.\n"
    "Every exit path prints one JSON document on stdout; logs go to stderr.";

// Raised while checking flags, before any file is read or metric computed.
struct UsageError : mm::Error {
  explicit UsageError(const std::string& what) : mm::Error("UsageError", what) {}
};

void emit(const json& j) { std::cout << j.dump() << '\n'; }

int fail(const std::string& kind, const std::string& message, int code) {
  emit(json{{"error", kind}, {"message", message}});
  std::cerr << "merge-metrics: " << kind << ": " << message << '\n';
  return code;
}

void log(bool verbose, const std::string& line) {
  if (verbose) std::cerr << "merge-metrics: " << line << '\n';
}

// "a..b" inclusive, or a comma list "4,16,64".
std::vector<std::size_t> parse_indices(const std::string& text) {
  auto to_index = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (s.empty() || s.front() == '-') throw std::invalid_argument(s);
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad index '" + s + "' in --n '" + text + "'");
    }
    if (used != s.size()) throw UsageError("bad index '" + s + "' in --n '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t a = to_index(text.substr(0, dots));
    const std::size_t b = to_index(text.substr(dots + 2));
    if (a > b) throw UsageError("empty range --n '" + text + "'");
    if (b - a >= 100000) throw UsageError("range --n '" + text + "' is too long");
    return mm::index_range(a, b);
  }
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(to_index(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

mm::MetricKind sample_metric(const std::string& name) {
  if (name == "euclidean") return mm::MetricKind::Euclidean;
  if (name == "l1") return mm::MetricKind::L1;
  throw UsageError("--sample-metric must be euclidean or l1");
}

// Loads two measures; coordinate measures on different point sets are
// re-expressed over the union of their points.
std::pair<mm::DiscreteMeasure, mm::DiscreteMeasure> load_pair(const std::string& a, const std::string& b,
                                                                mm::MetricKind kind) {
  auto p = mm::io::load_measure(a, kind);
  auto q = mm::io::load_measure(b, kind);
  if (p.space() == q.space() || *p.space() == *q.space()) {
    return {p, mm::DiscreteMeasure(p.space(), q.weights())};
  }
  return mm::merge_onto_union(p, q);
}

json selftest_json(const mm::SelftestReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) {
    suites.push_back({{"name", s.name}, {"cases", s.cases}, {"failures", s.failures}, {"detail", s.detail}});
  }
  return json{{"seed", r.seed}, {"passed", r.passed()}, {"rng", mm::Rng::kAlgorithm}, {"suites", suites}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mm::Error("IoError", "cannot write '" + path + "'");
  out << text;
  if (!out) throw mm::Error("IoError", "failed writing '" + path + "'");
}

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Merging diagnostics for finitely supported measures on metric spaces.", "merge-metrics"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.allow_extras(false);
  app.fallthrough();
  bool verbose = false;
  std::string metric_name = "euclidean";
  app.add_flag("-v,--verbose", verbose, "Log progress on stderr");
  app.add_option("--sample-metric", metric_name, "Metric for *.csv sample files (euclidean or l1)")
      ->capture_default_str();

  std::string file_a, file_b;
  auto two_files = [&](CLI::App* cmd) {
    cmd->add_option("A", file_a, "Measure file (JSON, or CSV sample)")->required();
    cmd->add_option("B", file_b, "Measure file (JSON, or CSV sample)")->required();
  };

  auto* pi_cmd = app.add_subcommand("pi", "Levy-Prokhorov distance: {pi, breakpoint, transported_mass}");
  two_files(pi_cmd);
  std::string pi_method = "scan";
  pi_cmd->add_option("--method", pi_method, "scan or bisection")->capture_default_str();

  auto* beta_cmd = app.add_subcommand("beta", "Bounded-Lipschitz distance with witness");
  two_files(beta_cmd);

  auto* omega_cmd = app.add_subcommand("omega-sup", "sup over |f| <= bound with modulus dominated by omega");
  two_files(omega_cmd);
  std::string modulus_file;
  double bound = 1.0;
  omega_cmd->add_option("--modulus", modulus_file, "Modulus file {\"knots\": [[h, w]...], \"tail\": ...}")
      ->required();
  omega_cmd->add_option("--bound", bound, "Sup-norm bound")->capture_default_str();

  auto* class_cmd = app.add_subcommand("class-sup", "sup over a named function class");
  two_files(class_cmd);
  std::string class_name;
  class_cmd->add_option("--class", class_name, "F1, Feps:<eps> or BL")->required();

  auto* couple_cmd = app.add_subcommand("couple", "Optimal coupling: {alpha, joint: [[i, j, mass]...]}");
  two_files(couple_cmd);

  auto* push_cmd = app.add_subcommand("pushforward", "Image measure of A under a function");
  push_cmd->add_option("A", file_a, "Measure file")->required();
  std::string function_file;
  push_cmd->add_option("--function", function_file, "Function file (tabulated or analytic)")->required();

  auto* scenario_cmd = app.add_subcommand("scenario", "Built-in merging scenarios");
  scenario_cmd->require_subcommand(1);
  auto* list_cmd = scenario_cmd->add_subcommand("list", "List scenario names");
  auto* run_cmd = scenario_cmd->add_subcommand("run", "Diagnose a scenario over a range of indices");
  std::string scenario_name, n_text, out_path;
  std::vector<std::string> metrics;
  std::vector<double> thresholds{0.05};
  std::size_t window = 5;
  mm::ScenarioOptions options;
  run_cmd->add_option("name", scenario_name, "Scenario name")->required();
  run_cmd->add_option("--n", n_text, "Indices: a..b or a comma list (default: scenario default)");
  run_cmd->add_option("--metrics", metrics, "Comma list of pi, beta, BL, F1, Feps:<eps>")->delimiter(',');
  run_cmd->add_option("--threshold", thresholds, "Comma list of thresholds")->delimiter(',')->capture_default_str();
  run_cmd->add_option("--window", window, "Trailing window of the verdict rule")->capture_default_str();
  run_cmd->add_option("--seed", options.seed, "Seed for stochastic scenarios")->capture_default_str();
  run_cmd->add_option("--samples", options.sample_size, "Monte-Carlo sample size")->capture_default_str();
  run_cmd->add_option("--law-f", options.law_f, "gaussian or rademacher")->capture_default_str();
  run_cmd->add_option("--law-g", options.law_g, "gaussian or rademacher")->capture_default_str();
  run_cmd->add_option("--form", options.form, "chain or square")->capture_default_str();
  run_cmd->add_option("--delta-rule", options.delta_rule, "inverse or inverse_square")->capture_default_str();
  run_cmd->add_option("--out", out_path, "Also write the report to a file (*.csv as CSV, else JSON)");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant suites on seeded instances");
  std::uint64_t selftest_seed = 1;
  std::size_t selftest_cases = 200;
  selftest_cmd->add_option("--seed", selftest_seed, "Seed")->capture_default_str();
  selftest_cmd->add_option("--cases", selftest_cases, "Instances per random suite")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) return fail("UsageError", e.what(), kExitUsage);
    std::ostringstream text;
    app.exit(e, text, text);
    emit(json{{"usage", text.str()}});
    return kExitOk;
  }

  // Flag validation; nothing is read or computed yet.
  mm::MetricKind kind{};
  std::optional<mm::FunctionClassSpec> class_spec;
  std::optional<mm::Scenario> scenario;
  std::vector<std::size_t> indices;
  try {
    kind = sample_metric(metric_name);
    if (*pi_cmd && pi_method != "scan" && pi_method != "bisection") {
      throw UsageError("--method must be scan or bisection");
    }
    if (*omega_cmd && !(bound > 0.0 && std::isfinite(bound))) throw UsageError("--bound must be positive");
    if (*class_cmd) class_spec = mm::FunctionClassSpec::parse(class_name);
    if (*run_cmd) {
      if (!n_text.empty()) options.indices = parse_indices(n_text);
      for (const auto& m : metrics) {
        if (m != "pi" && m != "beta") (void)mm::FunctionClassSpec::parse(m);
      }
      for (double t : thresholds) {
        if (!(t > 0.0 && std::isfinite(t))) throw UsageError("thresholds must be positive and finite");
      }
      if (window == 0) throw UsageError("--window must be positive");
      scenario = mm::make_scenario(scenario_name, options);
      indices = scenario->indices();
      for (std::size_t n : indices) {
        if (n < scenario->n_min() || n > scenario->n_max()) {
          throw UsageError("index " + std::to_string(n) + " outside [" + std::to_string(scenario->n_min()) + ", " +
                           std::to_string(scenario->n_max()) + "] for " + scenario_name);
        }
      }
    }
  } catch (const mm::Error& e) {
    return fail(e.kind(), e.what(), kExitUsage);
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    if (*pi_cmd) {
      const auto [p, q] = load_pair(file_a, file_b, kind);
      emit(mm::io::to_json(mm::prokhorov_distance(
          p, q, pi_method == "scan" ? mm::ProkhorovMethod::BreakpointScan : mm::ProkhorovMethod::Bisection)));
    } else if (*beta_cmd) {
      const auto [p, q] = load_pair(file_a, file_b, kind);
      emit(mm::io::to_json(mm::beta_distance(p, q)));
    } else if (*omega_cmd) {
      const auto omega = mm::io::modulus_from_json(mm::io::read_json_file(modulus_file));
      const auto [p, q] = load_pair(file_a, file_b, kind);
      emit(mm::io::to_json(mm::omega_sup(p, q, omega, bound)));
    } else if (*class_cmd) {
      const auto [p, q] = load_pair(file_a, file_b, kind);
      json j = mm::io::to_json(mm::class_sup(p, q, *class_spec));
      j["class"] = class_spec->label();
      emit(j);
    } else if (*couple_cmd) {
      const auto [p, q] = load_pair(file_a, file_b, kind);
      emit(mm::io::to_json(mm::optimal_coupling(p, q)));
    } else if (*push_cmd) {
      const auto p = mm::io::load_measure(file_a, kind);
      const auto f = mm::io::function_from_json(mm::io::read_json_file(function_file), p.space());
      emit(mm::io::measure_to_json(mm::pushforward(p, f)));
    } else if (*list_cmd) {
      emit(json{{"scenarios", mm::scenario_names()}});
    } else if (*run_cmd) {
      log(verbose, "scenario " + scenario_name + ": " + std::to_string(indices.size()) + " indices on " +
                       std::to_string(mm::thread_budget()) + " threads");
      mm::DiagnoseConfig config;
      config.metrics = metrics;
      config.thresholds = thresholds;
      config.window = window;
      const auto report = mm::diagnose(*scenario, indices, config);
      const json j = mm::io::to_json(report);
      if (!out_path.empty()) {
        write_file(out_path, ends_with(out_path, ".csv") ? mm::io::to_csv(report) : j.dump() + "\n");
        log(verbose, "wrote " + out_path);
      }
      emit(j);
    } else if (*selftest_cmd) {
      const auto report = mm::run_selftest(selftest_seed, selftest_cases);
      for (const auto& s : report.suites) {
        log(verbose, s.name + ": " + std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases));
      }
      emit(selftest_json(report));
      if (!report.passed()) {
        std::cerr << "merge-metrics: selftest failed\n";
        return kExitFailure;
      }
    }
  } catch (const mm::Error& e) {
    return fail(e.kind(), e.what(), kExitFailure);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), kExitFailure);
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log(verbose, "done in " + std::to_string(elapsed) + " s");
  return kExitOk;
}
