#include "merge_metrics/func_kit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

namespace {

struct PairOrder {
  std::vector<double> distance;
  std::vector<std::pair<std::size_t, std::size_t>> pair;
};

// All pairs i < j sorted by distance.
PairOrder sorted_pairs(const MetricSpace& space) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> all;
  const std::size_t n = space.size();
  all.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(space.dist(i, j), i, j);
  }
  std::sort(all.begin(), all.end());
  PairOrder order;
  order.distance.reserve(all.size());
  order.pair.reserve(all.size());
  for (const auto& [d, i, j] : all) {
    order.distance.push_back(d);
    order.pair.emplace_back(i, j);
  }
  return order;
}

ModulusProfile profile_of(const PairOrder& order, const std::vector<double>& values) {
  ModulusProfile profile;
  double running = 0.0;
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t k = 0; k < order.distance.size(); ++k) {
    const auto [i, j] = order.pair[k];
    const double diff = std::abs(values[i] - values[j]);
    if (diff > running) {
      running = diff;
      best = {i, j};
    }
    const bool last_at_distance = k + 1 == order.distance.size() || order.distance[k + 1] != order.distance[k];
    if (last_at_distance) {
      profile.distances.push_back(order.distance[k]);
      profile.omega.push_back(running);
      profile.witness.push_back(best);
    }
  }
  return profile;
}

double sup_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void require_same_space(const FunctionOnSpace& f, const FunctionOnSpace& g) {
  require_common_space(f.space(), g.space());
}

}  // namespace

double ModulusProfile::at(double h) const {
  const auto it = std::upper_bound(distances.begin(), distances.end(), h);
  if (it == distances.begin()) return 0.0;
  return omega[static_cast<std::size_t>(it - distances.begin()) - 1];
}

double empirical_modulus(const FunctionOnSpace& f, double h) {
  const auto& v = f.values();
  const MetricSpace& space = *f.space();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (space.dist(i, j) <= h) best = std::max(best, std::abs(v[i] - v[j]));
    }
  }
  return best;
}

ModulusProfile modulus_profile(const FunctionOnSpace& f) {
  return profile_of(sorted_pairs(*f.space()), f.values());
}

FunctionOnSpace truncate_f(const FunctionOnSpace& f, const PointSet& set, double t) {
  if (!(t > 0.0)) throw Error("NonpositiveT", "truncation radius must be positive");
  if (set.empty()) throw Error("EmptySet", "truncation around an empty set");
  require_common_space(f.space(), set.space());
  std::vector<double> out(f.values().size(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    if (set.contains(x)) {
      out[x] = f[x];
      continue;
    }
    const double r = dist_to_set(x, set);
    if (r <= t) out[x] = f[x] * (1.0 - r / t);
  }
  return FunctionOnSpace::tabulated(f.space(), std::move(out));
}

FunctionOnSpace smoothed_indicator(const PointSet& set, double eps) {
  if (!(eps > 0.0)) throw Error("InvalidArgument", "indicator width must be positive");
  if (set.empty()) throw Error("EmptySet", "indicator of an empty set");
  std::vector<double> out(set.space()->size(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    if (set.contains(x)) {
      out[x] = 1.0;
      continue;
    }
    const double r = dist_to_set(x, set);
    if (r <= eps) out[x] = 1.0 - r / eps;
  }
  return FunctionOnSpace::tabulated(set.space(), std::move(out));
}

FunctionOnSpace pointwise_product(const FunctionOnSpace& f, const FunctionOnSpace& g) {
  require_same_space(f, g);
  std::vector<double> out(f.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
  return FunctionOnSpace::tabulated(f.space(), std::move(out));
}

FunctionOnSpace pointwise_max(const FunctionOnSpace& f, const FunctionOnSpace& g) {
  require_same_space(f, g);
  std::vector<double> out(f.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(f[i], g[i]);
  return FunctionOnSpace::tabulated(f.space(), std::move(out));
}

FunctionOnSpace pointwise_min(const FunctionOnSpace& f, const FunctionOnSpace& g) {
  require_same_space(f, g);
  std::vector<double> out(f.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(f[i], g[i]);
  return FunctionOnSpace::tabulated(f.space(), std::move(out));
}

ModulusAlgebraReport modulus_algebra_check(const FunctionOnSpace& f, const FunctionOnSpace& g) {
  require_same_space(f, g);
  const PairOrder order = sorted_pairs(*f.space());
  const ModulusProfile wf = profile_of(order, f.values());
  const ModulusProfile wg = profile_of(order, g.values());
  const ModulusProfile wprod = profile_of(order, pointwise_product(f, g).values());
  const ModulusProfile wmax = profile_of(order, pointwise_max(f, g).values());
  const ModulusProfile wmin = profile_of(order, pointwise_min(f, g).values());
  const double fs = f.sup_norm();
  const double gs = g.sup_norm();

  ModulusAlgebraReport report;
  auto record = [&](const char* name, std::size_t k, const ModulusProfile& lhs, double rhs) {
    if (!report.violation) {
      report.violation = InequalityViolation{name, lhs.distances[k], lhs.witness[k].first,
                                             lhs.witness[k].second, lhs.omega[k], rhs};
    }
  };
  for (std::size_t k = 0; k < wf.distances.size(); ++k) {
    const double product_bound = gs * wf.omega[k] + fs * wg.omega[k];
    const double lattice_bound = std::max(wf.omega[k], wg.omega[k]);
    if (wprod.omega[k] > product_bound) {
      report.product_holds = false;
      record("product", k, wprod, product_bound);
    }
    if (wmax.omega[k] > lattice_bound) {
      report.max_holds = false;
      record("max", k, wmax, lattice_bound);
    }
    if (wmin.omega[k] > lattice_bound) {
      report.min_holds = false;
      record("min", k, wmin, lattice_bound);
    }
  }
  return report;
}

TruncationReport truncation_modulus_bound(const FunctionOnSpace& f, const PointSet& set, double t) {
  const FunctionOnSpace truncated = truncate_f(f, set, t);
  const PairOrder order = sorted_pairs(*f.space());
  const ModulusProfile wf = profile_of(order, f.values());
  const ModulusProfile wt = profile_of(order, truncated.values());
  const double fs = sup_of(f.values());

  TruncationReport report;
  report.sup_norm_holds = sup_of(truncated.values()) <= fs;
  for (std::size_t k = 0; k < wf.distances.size(); ++k) {
    const double bound = wf.omega[k] + fs * wf.distances[k] / t;
    if (wt.omega[k] > bound) {
      report.modulus_holds = false;
      if (!report.violation) {
        report.violation = InequalityViolation{"truncation", wf.distances[k], wt.witness[k].first,
                                               wt.witness[k].second, wt.omega[k], bound};
      }
    }
  }
  return report;
}

DiscreteMeasure pushforward(const DiscreteMeasure& p, const FunctionOnSpace& f) {
  if (f.is_tabulated()) require_common_space(f.space(), p.space());
  std::map<double, double> atoms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double v = f.is_tabulated() ? f.values().at(i) : f.evaluate(*p.space(), i);
    if (!std::isfinite(v)) throw UndefinedAt(i);
    atoms[v == 0.0 ? 0.0 : v] += p[i];  // folds -0.0 into 0.0
  }
  Coordinates points;
  std::vector<double> weights;
  for (const auto& [v, w] : atoms) {
    points.push_back({v});
    weights.push_back(w);
  }
  return DiscreteMeasure(make_space(MetricSpace::from_coordinates(std::move(points), MetricKind::Euclidean)),
                         std::move(weights));
}

std::pair<DiscreteMeasure, DiscreteMeasure> pushforward_pair(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q,
                                                             const FunctionOnSpace& f) {
  require_common_space(p.space(), q.space());
  return merge_onto_union(pushforward(p, f), pushforward(q, f));
}

}  // namespace merge_metrics
