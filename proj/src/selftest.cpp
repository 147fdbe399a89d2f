#include "merge_metrics/selftest.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "merge_metrics/coupling.hpp"
#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/func_kit.hpp"
#include "merge_metrics/merging_lab.hpp"
#include "merge_metrics/prokhorov.hpp"
#include "merge_metrics/rng.hpp"

namespace merge_metrics {

bool SelftestReport::passed() const noexcept {
  for (const auto& s : suites) {
    if (!s.passed()) return false;
  }
  return true;
}

namespace {

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); }

// Distinct dyadic grid points, or uniform points, in [0, 2)^dim; every third
// instance is a shortest-path matrix metric with dyadic edge weights.
SpacePtr random_space(Rng& rng, std::size_t n, int flavour) {
  if (flavour % 3 == 2) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 0.125 * static_cast<double>(1 + below(rng, 12));
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
    return make_space(MetricSpace::from_matrix(d));
  }
  const std::size_t dim = flavour % 3 == 0 ? 1 : 2;
  const bool grid = flavour % 2 == 0;
  std::set<std::vector<double>> seen;
  Coordinates pts;
  while (pts.size() < n) {
    std::vector<double> x(dim);
    for (auto& c : x) c = grid ? 0.125 * static_cast<double>(below(rng, 16 + n)) : 2.0 * rng.uniform();
    if (seen.insert(x).second) pts.push_back(x);
  }
  return make_space(MetricSpace::from_coordinates(std::move(pts), MetricKind::Euclidean));
}

DiscreteMeasure random_measure(Rng& rng, const SpacePtr& s) {
  std::vector<double> w(s->size(), 0.0);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform() < 0.3 ? 0.0 : 0.05 + rng.uniform();
    total += x;
  }
  if (total == 0.0) {
    w[below(rng, w.size())] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return DiscreteMeasure(s, w);
}

FunctionOnSpace random_function(Rng& rng, const SpacePtr& s) {
  std::vector<double> v(s->size());
  for (auto& x : v) x = rng.uniform() < 0.15 ? 0.0 : 4.0 * rng.uniform() - 2.0;
  return FunctionOnSpace::tabulated(s, v);
}

PointSet random_set(Rng& rng, const SpacePtr& s) {
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < s->size(); ++i) {
    if (rng.uniform() < 0.35) m.push_back(i);
  }
  if (m.empty()) m.push_back(below(rng, s->size()));
  return PointSet(s, m);
}

// Runs `check` for each case; a false return or an exception is a failure.
SelftestSuite run_suite(const std::string& name, std::size_t cases, const std::function<bool(std::size_t)>& check) {
  SelftestSuite suite{name, cases, 0, {}};
  for (std::size_t c = 0; c < cases; ++c) {
    bool ok = false;
    std::string why;
    try {
      ok = check(c);
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!ok) {
      if (suite.failures == 0) suite.detail = "case " + std::to_string(c) + (why.empty() ? "" : ": " + why);
      ++suite.failures;
    }
  }
  return suite;
}

}  // namespace

SelftestReport run_selftest(std::uint64_t seed, std::size_t cases) {
  SelftestReport report;
  report.seed = seed;
  std::uint64_t stream = 0;

  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("prokhorov_oracle", cases, [&](std::size_t c) {
      const auto s = random_space(rng, 1 + below(rng, 8), static_cast<int>(c));
      const auto p = random_measure(rng, s);
      const auto q = random_measure(rng, s);
      const auto oracle = prokhorov_oracle(p, q);
      return std::abs(prokhorov_distance(p, q).pi - oracle.pi) <= 1e-9 && oracle.directions_agree;
    }));
  }
  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("strassen_coupling", cases, [&](std::size_t c) {
      const auto s = random_space(rng, 1 + below(rng, 10), static_cast<int>(c));
      const auto p = random_measure(rng, s);
      const auto q = random_measure(rng, s);
      const auto oc = optimal_coupling(p, q);
      return std::abs(oc.alpha - prokhorov_distance(p, q).pi) <= 1e-9 && oc.coupling.marginal_error(p, q) <= 1e-9;
    }));
  }
  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("pi_le_2_sqrt_beta", cases, [&](std::size_t c) {
      const auto s = random_space(rng, 1 + below(rng, 8), static_cast<int>(c));
      const auto p = random_measure(rng, s);
      const auto q = random_measure(rng, s);
      return prokhorov_distance(p, q).pi <= 2.0 * std::sqrt(beta_distance(p, q).value) + 1e-7;
    }));
  }
  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("two_point_closed_forms", cases, [&](std::size_t) {
      const double d = 10.0 * (1.0 - rng.uniform());
      const auto s = make_space(MetricSpace::from_coordinates({{0.0}, {d}}, MetricKind::Euclidean));
      const auto p = point_mass(s, 0);
      const auto q = point_mass(s, 1);
      return std::abs(prokhorov_distance(p, q).pi - std::min(d, 1.0)) <= 1e-7 &&
             std::abs(beta_distance(p, q).value - 2 * d / (d + 2)) <= 1e-7;
    }));
  }
  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("modulus_inequalities", cases, [&](std::size_t c) {
      const auto s = random_space(rng, 2 + below(rng, 7), static_cast<int>(c));
      const auto f = random_function(rng, s);
      const auto g = random_function(rng, s);
      const auto k = random_set(rng, s);
      const double t = 0.05 + 2.0 * rng.uniform();
      const double eps = 0.05 + 2.0 * rng.uniform();
      if (!modulus_algebra_check(f, g).passed() || !truncation_modulus_bound(f, k, t).passed()) return false;
      const auto ind = smoothed_indicator(k, eps);
      const auto nbhd = eps_neighborhood(k, eps);
      for (std::size_t x = 0; x < s->size(); ++x) {
        if ((k.contains(x) ? 1.0 : 0.0) > ind[x] || ind[x] > (nbhd.contains(x) ? 1.0 : 0.0)) return false;
        for (std::size_t y = 0; y < s->size(); ++y) {
          if (std::abs(dist_to_set(x, k) - dist_to_set(y, k)) > s->dist(x, y)) return false;
        }
      }
      return true;
    }));
  }
  {
    Rng rng(mix_seed(seed, stream++));
    report.suites.push_back(run_suite("coupling_tail_bound", cases, [&](std::size_t c) {
      const auto s = random_space(rng, 1 + below(rng, 9), static_cast<int>(c));
      const auto p = random_measure(rng, s);
      const auto q = random_measure(rng, s);
      std::vector<double> v(s->size());
      for (auto& x : v) x = 3.0 * rng.uniform() - 1.5;
      const auto f = FunctionOnSpace::tabulated(s, v);
      const double eps = 1.5 * rng.uniform();
      const auto g = optimal_coupling(p, q).coupling;
      const double lhs = std::abs(integrate(f, signed_diff(first_marginal_measure(g), second_marginal_measure(g))));
      return lhs <= 2 * f.sup_norm() * g.mass_beyond(eps) + empirical_modulus(f, eps) + 1e-12;
    }));
  }
  {
    const std::vector<std::string> names{"point_masses", "diverging_masses", "remark1", "tight_classical"};
    const std::vector<bool> expect{true, false, true, true};
    report.suites.push_back(run_suite("scenario_verdicts", names.size(), [&](std::size_t c) {
      const auto sc = make_scenario(names[c], {});
      const auto rep = diagnose(sc, sc.indices());
      return rep.merging.front() == expect[c] && rep.coherent;
    }));
  }
  return report;
}

}  // namespace merge_metrics
