#include "merge_metrics/dual_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/linear_program.hpp"

namespace merge_metrics {

FunctionClassSpec FunctionClassSpec::bl_unit() {
  FunctionClassSpec spec;
  spec.kind = Kind::BLUnit;
  return spec;
}

FunctionClassSpec FunctionClassSpec::f_one() {
  FunctionClassSpec spec;
  spec.kind = Kind::FOne;
  return spec;
}

FunctionClassSpec FunctionClassSpec::f_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error("InvalidArgument", "F_eps needs eps > 0");
  FunctionClassSpec spec;
  spec.kind = Kind::FEps;
  spec.eps = eps;
  return spec;
}

FunctionClassSpec FunctionClassSpec::f_omega(Modulus modulus, double bound, double slack_k) {
  if (!(bound > 0.0) || !(slack_k >= 0.0)) {
    throw Error("InvalidArgument", "F_omega needs bound > 0 and slack k >= 0");
  }
  FunctionClassSpec spec;
  spec.kind = Kind::FOmega;
  spec.modulus = std::move(modulus);
  spec.bound = bound;
  spec.slack_k = slack_k;
  return spec;
}

FunctionClassSpec FunctionClassSpec::parse(const std::string& text) {
  if (text == "BL") return bl_unit();
  if (text == "F1") return f_one();
  if (text.rfind("Feps:", 0) == 0) {
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(text.substr(5), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 5) throw Error("InvalidArgument", "bad class '" + text + "'");
    return f_eps(eps);
  }
  throw Error("InvalidArgument", "unknown function class '" + text + "' (expected BL, F1 or Feps:<eps>)");
}

std::string FunctionClassSpec::label() const {
  switch (kind) {
    case Kind::BLUnit:
      return "BL";
    case Kind::FOne:
      return "F1";
    case Kind::FEps: {
      std::string s = std::to_string(eps);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "Feps:" + s;
    }
    case Kind::FOmega:
      return "Fomega";
  }
  return "Fomega";
}

namespace {

struct SupportView {
  std::vector<std::size_t> points;
  std::vector<double> psi;
};

SupportView support_of(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  require_common_space(p.space(), q.space());
  SupportView view;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 || q[i] > 0.0) {
      view.points.push_back(i);
      view.psi.push_back(p[i] - q[i]);
    }
  }
  return view;
}

// Extends values given on `points` to the whole space:
// f(x) = clamp(min_j f_j + envelope(dist(x, j)), -bound, bound).
template <class Envelope>
FunctionOnSpace extend(const SpacePtr& space, const std::vector<std::size_t>& points,
                       const std::vector<double>& values, double bound, Envelope envelope) {
  std::vector<double> full(space->size(), 0.0);
  std::vector<bool> known(space->size(), false);
  for (std::size_t k = 0; k < points.size(); ++k) {
    full[points[k]] = values[k];
    known[points[k]] = true;
  }
  for (std::size_t x = 0; x < full.size(); ++x) {
    if (known[x]) continue;
    double best = bound;
    for (std::size_t k = 0; k < points.size(); ++k) {
      best = std::min(best, values[k] + envelope(space->dist(x, points[k])));
    }
    full[x] = std::clamp(best, -bound, bound);
  }
  return FunctionOnSpace::tabulated(space, std::move(full));
}

// Pair rows f_i - f_j <= offset_ij + scale_ij * x[scaled] are added lazily:
// the program starts from each point's nearest neighbours and the worst
// violated pairs join after every solve until none is violated.
struct PairFamily {
  std::vector<std::vector<double>> dist;
  std::vector<std::vector<double>> offset;
  std::vector<std::vector<double>> scale;
  std::size_t scaled = 0;
  bool has_scaled = false;
};

constexpr std::size_t kInitialNeighbours = 4;
constexpr double kPairViolation = 1e-12;

LpSolution solve_with_lazy_pairs(const LinearProgram& base, const PairFamily& pairs) {
  const std::size_t k = pairs.dist.size();
  std::vector<std::vector<bool>> active(k, std::vector<bool>(k, false));
  LinearProgram lp = base;
  auto add_pair = [&](std::size_t i, std::size_t j) {
    if (active[i][j]) return;
    active[i][j] = active[j][i] = true;
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t a = dir == 0 ? i : j;
      const std::size_t b = dir == 0 ? j : i;
      std::vector<double> row(lp.variables(), 0.0);
      row[a] = 1.0;
      row[b] = -1.0;
      if (pairs.has_scaled) row[pairs.scaled] = -pairs.scale[a][b];
      lp.add_row(std::move(row), pairs.offset[a][b]);
    }
  };
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) order.push_back(j);
    }
    const std::size_t take = std::min(kInitialNeighbours, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return pairs.dist[i][a] != pairs.dist[i][b] ? pairs.dist[i][a] < pairs.dist[i][b] : a < b;
                      });
    for (std::size_t t = 0; t < take; ++t) add_pair(i, order[t]);
  }
  const std::size_t per_round = std::max<std::size_t>(k, 16);
  while (true) {
    LpSolution solution = solve_lp(lp);
    const auto& x = solution.witness;
    const double s = pairs.has_scaled ? x[pairs.scaled] : 0.0;
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> violated;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (active[i][j]) continue;
        const double gap = std::abs(x[i] - x[j]);
        const double room = x[i] >= x[j] ? pairs.offset[i][j] + pairs.scale[i][j] * s
                                         : pairs.offset[j][i] + pairs.scale[j][i] * s;
        const double excess = gap - room;
        if (excess > kPairViolation * (1.0 + std::abs(room))) violated.push_back({-excess, {i, j}});
      }
    }
    if (violated.empty()) return solution;
    const std::size_t take = std::min(per_round, violated.size());
    std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take), violated.end());
    for (std::size_t t = 0; t < take; ++t) add_pair(violated[t].second.first, violated[t].second.second);
  }
}

}  // namespace

DualResult beta_distance_lp(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  const SupportView view = support_of(p, q);
  const MetricSpace& space = *p.space();
  const std::size_t k = view.points.size();
  const std::size_t lip = k;
  const std::size_t sup = k + 1;

  LinearProgram lp;
  lp.objective.assign(k + 2, 0.0);
  for (std::size_t i = 0; i < k; ++i) lp.objective[i] = view.psi[i];
  lp.lower.assign(k + 2, 0.0);
  lp.upper.assign(k + 2, kInfinity);
  for (std::size_t i = 0; i < k; ++i) lp.lower[i] = -kInfinity;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> row(k + 2, 0.0);
    row[i] = 1.0;
    row[sup] = -1.0;
    lp.add_row(row, 0.0);
    row[i] = -1.0;
    lp.add_row(std::move(row), 0.0);
  }
  {
    std::vector<double> row(k + 2, 0.0);
    row[lip] = 1.0;
    row[sup] = 1.0;
    lp.add_row(std::move(row), 1.0);
  }
  PairFamily pairs;
  pairs.dist.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) pairs.dist[i][j] = space.dist(view.points[i], view.points[j]);
  }
  pairs.offset.assign(k, std::vector<double>(k, 0.0));
  pairs.scale = pairs.dist;
  pairs.scaled = lip;
  pairs.has_scaled = true;

  const LpSolution solution = solve_with_lazy_pairs(lp, pairs);
  const double l = solution.witness[lip];
  const double m = solution.witness[sup];
  std::vector<double> values(solution.witness.begin(), solution.witness.begin() + static_cast<std::ptrdiff_t>(k));
  DualResult result;
  result.value = std::max(solution.optimum, 0.0);
  result.witness = extend(p.space(), view.points, values, m, [l](double d) { return l * d; });
  result.lipschitz_budget = l;
  result.sup_budget = m;
  return result;
}

namespace {

// Support sorted along the line, with the gaps between neighbours.
struct LineView {
  std::vector<std::size_t> points;
  std::vector<double> psi;
  std::vector<double> gaps;
};

LineView line_view(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  SupportView view = support_of(p, q);
  const MetricSpace& space = *p.space();
  if (!space.is_real_line()) throw Error("InvalidArgument", "line solver needs a 1-D euclidean space");
  const auto& coords = space.coordinates();
  std::vector<std::size_t> order(view.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coords[view.points[a]][0] < coords[view.points[b]][0];
  });
  LineView line;
  line.points.resize(order.size());
  line.psi.resize(order.size());
  line.gaps.resize(order.empty() ? 0 : order.size() - 1);
  for (std::size_t r = 0; r < order.size(); ++r) {
    line.points[r] = view.points[order[r]];
    line.psi[r] = view.psi[order[r]];
    if (r > 0) line.gaps[r - 1] = space.dist(line.points[r - 1], line.points[r]);
  }
  return line;
}

std::size_t support_size(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  std::size_t support = 0;
  for (std::size_t i = 0; i < p.size(); ++i) support += (p[i] > 0.0 || q[i] > 0.0) ? 1 : 0;
  return support;
}

// sup over |f| <= bound, Lip(f) <= lip of |integral f d(p - q)| on a line.
DualResult line_class_sup(const DiscreteMeasure& p, const DiscreteMeasure& q, double lip, double bound) {
  const LineView line = line_view(p, q);
  DualResult result;
  if (line.points.empty()) {
    result.witness = FunctionOnSpace::tabulated(p.space(), std::vector<double>(p.size(), 0.0));
    return result;
  }
  std::vector<double> plus_values;
  std::vector<double> minus_values;
  std::vector<double> negated = line.psi;
  for (double& v : negated) v = -v;
  const double plus = chain_sup(line.psi, line.gaps, lip, bound, &plus_values);
  const double minus = chain_sup(negated, line.gaps, lip, bound, &minus_values);
  std::vector<double> values = plus_values;
  result.value = plus;
  if (minus > plus) {
    result.value = minus;
    values = minus_values;
    for (double& v : values) v = -v;
  }
  result.value = std::max(result.value, 0.0);
  result.witness = extend(p.space(), line.points, values, bound, [lip](double d) { return lip * d; });
  return result;
}

}  // namespace

DualResult beta_distance_line(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  const LineView line = line_view(p, q);
  const std::vector<double>& psi = line.psi;
  const std::vector<double>& gaps = line.gaps;

  DualResult result;
  if (line.points.empty()) {
    result.witness = FunctionOnSpace::tabulated(p.space(), std::vector<double>(p.size(), 0.0));
    return result;
  }
  auto value_at = [&](double lambda) { return chain_sup(psi, gaps, lambda, 1.0 - lambda); };

  // Golden-section search for the maximum of a concave function on [0, 1].
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = value_at(x1);
  double f2 = value_at(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = value_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = value_at(x1);
    }
  }
  const double lambda = f1 >= f2 ? x1 : x2;
  std::vector<double> chain_witness;
  result.value = std::max(chain_sup(psi, gaps, lambda, 1.0 - lambda, &chain_witness), 0.0);
  result.witness = extend(p.space(), line.points, chain_witness, 1.0 - lambda, [lambda](double d) { return lambda * d; });
  result.lipschitz_budget = lambda;
  result.sup_budget = 1.0 - lambda;
  return result;
}

DualResult beta_distance(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  require_common_space(p.space(), q.space());
  if (p.space()->is_real_line()) {
    if (support_size(p, q) > kLineSupportThreshold) return beta_distance_line(p, q);
  }
  return beta_distance_lp(p, q);
}

DualResult omega_sup(const DiscreteMeasure& p, const DiscreteMeasure& q, const Modulus& omega,
                     double bound, double slack_k) {
  if (!(bound > 0.0) || !std::isfinite(bound)) throw Error("InvalidArgument", "bound must be positive");
  if (!(slack_k >= 0.0) || !std::isfinite(slack_k)) throw Error("InvalidArgument", "slack k must be >= 0");
  const SupportView view = support_of(p, q);
  const MetricSpace& space = *p.space();
  const std::size_t k = view.points.size();
  auto envelope = [&](double d) { return omega(d) + slack_k * d; };

  LinearProgram lp;
  lp.objective.assign(k, 0.0);
  lp.lower.assign(k, -kInfinity);
  lp.upper.assign(k, kInfinity);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> row(k, 0.0);
    row[i] = 1.0;
    lp.add_row(row, bound);
    row[i] = -1.0;
    lp.add_row(std::move(row), bound);
  }
  PairFamily pairs;
  pairs.dist.assign(k, std::vector<double>(k, 0.0));
  pairs.offset.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      pairs.dist[i][j] = space.dist(view.points[i], view.points[j]);
      pairs.offset[i][j] = envelope(pairs.dist[i][j]);
    }
  }
  pairs.scale.assign(k, std::vector<double>(k, 0.0));

  lp.objective = view.psi;
  const LpSolution plus = solve_with_lazy_pairs(lp, pairs);
  for (double& c : lp.objective) c = -c;
  const LpSolution minus = solve_with_lazy_pairs(lp, pairs);

  std::vector<double> values = plus.witness;
  double value = plus.optimum;
  if (minus.optimum > plus.optimum) {
    value = minus.optimum;
    values = minus.witness;
    for (double& v : values) v = -v;
  }
  DualResult result;
  result.value = std::max(value, 0.0);
  result.witness = extend(p.space(), view.points, values, bound, envelope);
  return result;
}

DualResult class_sup(const DiscreteMeasure& p, const DiscreteMeasure& q, const FunctionClassSpec& spec) {
  switch (spec.kind) {
    case FunctionClassSpec::Kind::BLUnit:
      return beta_distance(p, q);
    case FunctionClassSpec::Kind::FOne:
    case FunctionClassSpec::Kind::FEps: {
      const double lip = spec.kind == FunctionClassSpec::Kind::FOne ? 1.0 : 1.0 / spec.eps;
      require_common_space(p.space(), q.space());
      if (p.space()->is_real_line() && support_size(p, q) > kLineSupportThreshold) {
        return line_class_sup(p, q, lip, 1.0);
      }
      return omega_sup(p, q, Modulus::linear(lip), 1.0);
    }
    case FunctionClassSpec::Kind::FOmega:
      if (!spec.modulus) throw Error("InvalidModulus", "F_omega class without a modulus");
      return omega_sup(p, q, *spec.modulus, spec.bound, spec.slack_k);
  }
  throw Error("InvalidArgument", "unknown function class");
}

bool witness_feasible(const DualResult& result, const FunctionClassSpec& spec, const DiscreteMeasure& p,
                      const DiscreteMeasure& q, double tolerance) {
  const SupportView view = support_of(p, q);
  const MetricSpace& space = *p.space();
  const auto& f = result.witness.values();
  double sup = 0.0;
  double lip = 0.0;
  for (std::size_t a = 0; a < view.points.size(); ++a) {
    sup = std::max(sup, std::abs(f[view.points[a]]));
    for (std::size_t b = a + 1; b < view.points.size(); ++b) {
      const std::size_t i = view.points[a];
      const std::size_t j = view.points[b];
      const double d = space.dist(i, j);
      const double diff = std::abs(f[i] - f[j]);
      lip = std::max(lip, diff / d);
      switch (spec.kind) {
        case FunctionClassSpec::Kind::BLUnit:
          break;
        case FunctionClassSpec::Kind::FOne:
          if (diff > d + tolerance) return false;
          break;
        case FunctionClassSpec::Kind::FEps:
          if (diff > d / spec.eps + tolerance) return false;
          break;
        case FunctionClassSpec::Kind::FOmega:
          if (diff > (*spec.modulus)(d) + spec.slack_k * d + tolerance) return false;
          break;
      }
    }
  }
  switch (spec.kind) {
    case FunctionClassSpec::Kind::BLUnit:
      return sup + lip <= 1.0 + tolerance;
    case FunctionClassSpec::Kind::FOmega:
      return sup <= spec.bound + tolerance;
    default:
      return sup <= 1.0 + tolerance;
  }
}

}  // namespace merge_metrics
