#include "merge_metrics/prokhorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

namespace {

// Deficits 1 - m(eps) at or below this are flow round-off, not mass.
constexpr double kDeficitSnap = 1e-12;

double deficit(const DiscreteMeasure& p, const DiscreteMeasure& q, double eps) {
  const double d = 1.0 - max_transportable_mass(p, q, eps);
  return d <= kDeficitSnap ? 0.0 : d;
}

std::vector<double> cross_distances(const MetricSpace& space, const std::vector<std::size_t>& a,
                                    const std::vector<std::size_t>& b) {
  std::vector<double> out{0.0};
  out.reserve(a.size() * b.size() + 1);
  for (std::size_t i : a) {
    for (std::size_t j : b) out.push_back(space.dist(i, j));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

FlowResult transport_within(const DiscreteMeasure& p, const DiscreteMeasure& q, double eps) {
  require_common_space(p.space(), q.space());
  if (!(eps >= 0.0)) throw Error("InvalidArgument", "eps must be nonnegative");
  const MetricSpace& space = *p.space();
  const auto sp = p.support();
  const auto sq = q.support();
  FlowProblem problem;
  problem.supplies.reserve(sp.size());
  problem.demands.reserve(sq.size());
  for (std::size_t i : sp) problem.supplies.push_back(p[i]);
  for (std::size_t j : sq) problem.demands.push_back(q[j]);
  for (std::size_t a = 0; a < sp.size(); ++a) {
    for (std::size_t b = 0; b < sq.size(); ++b) {
      if (space.dist(sp[a], sq[b]) <= eps) problem.edges.emplace_back(a, b);
    }
  }
  FlowResult result = max_flow(problem);
  for (FlowArc& arc : result.arcs) {
    arc.source = sp[arc.source];
    arc.sink = sq[arc.sink];
  }
  return result;
}

double max_transportable_mass(const DiscreteMeasure& p, const DiscreteMeasure& q, double eps) {
  return transport_within(p, q, eps).value;
}

ProkhorovResult prokhorov_distance(const DiscreteMeasure& p_in, const DiscreteMeasure& q_in,
                                   ProkhorovMethod method) {
  require_common_space(p_in.space(), q_in.space());
  // Canonical orientation, so that swapping the arguments replays the same
  // flow computations and the result is bit-for-bit symmetric.
  const bool swap = q_in.weights() < p_in.weights();
  const DiscreteMeasure& p = swap ? q_in : p_in;
  const DiscreteMeasure& q = swap ? p_in : q_in;
  if (method == ProkhorovMethod::Bisection) {
    ProkhorovResult result;
    if (deficit(p, q, 0.0) == 0.0) {
      result.transported_mass = max_transportable_mass(p, q, 0.0);
      return result;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (deficit(p, q, mid) <= mid) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    result.pi = hi;
    result.breakpoint = hi;
    result.transported_mass = max_transportable_mass(p, q, hi);
    return result;
  }

  const auto candidates = cross_distances(*p.space(), p.support(), q.support());
  ProkhorovResult best;
  best.pi = std::numeric_limits<double>::infinity();
  for (double d : candidates) {
    if (d >= best.pi) break;
    const double m = max_transportable_mass(p, q, d);
    const double short_fall = 1.0 - m <= kDeficitSnap ? 0.0 : 1.0 - m;
    const double value = std::max(d, short_fall);
    if (value < best.pi) {
      best.pi = value;
      best.breakpoint = d;
      best.transported_mass = m;
    }
    if (short_fall == 0.0) break;
  }
  return best;
}

ProkhorovOracleResult prokhorov_oracle(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  require_common_space(p.space(), q.space());
  const MetricSpace& space = *p.space();
  std::vector<std::size_t> points;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 || q[i] > 0.0) points.push_back(i);
  }
  const std::size_t u = points.size();
  if (u > kOracleSupportLimit) throw TooLarge(u, kOracleSupportLimit);

  // Distance from every subset (bitmask over `points`) to every point.
  const std::size_t subsets = std::size_t{1} << u;
  std::vector<double> to_set(subsets * u, std::numeric_limits<double>::infinity());
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    const std::size_t rest = mask & (mask - 1);
    for (std::size_t k = 0; k < u; ++k) {
      const double d = space.dist(points[low], points[k]);
      to_set[mask * u + k] = rest == 0 ? d : std::min(d, to_set[rest * u + k]);
    }
  }
  std::vector<double> pw(u), qw(u);
  for (std::size_t k = 0; k < u; ++k) {
    pw[k] = p[points[k]];
    qw[k] = q[points[k]];
  }

  // Largest violation of a(A) <= b(A^eps) (forward) or a(A^eps) <= b(A).
  auto worst = [&](const std::vector<double>& aw, const std::vector<double>& bw, double eps, bool transposed) {
    double out = 0.0;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      double inside = 0.0;
      double near = 0.0;
      for (std::size_t k = 0; k < u; ++k) {
        const bool member = (mask >> k) & 1U;
        const bool close = to_set[mask * u + k] <= eps;
        if (transposed) {
          if (member) inside += bw[k];
          if (close) near += aw[k];
        } else {
          if (member) inside += aw[k];
          if (close) near += bw[k];
        }
      }
      out = std::max(out, transposed ? near - inside : inside - near);
    }
    return out;
  };

  std::vector<double> distances{0.0, 1.0};
  for (std::size_t a = 0; a < u; ++a) {
    for (std::size_t b = a + 1; b < u; ++b) distances.push_back(space.dist(points[a], points[b]));
  }

  auto infimum = [&](const std::vector<double>& aw, const std::vector<double>& bw, bool transposed) {
    std::vector<double> candidates = distances;
    for (double d : distances) candidates.push_back(worst(aw, bw, d, transposed));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double eps : candidates) {
      if (eps >= 0.0 && worst(aw, bw, eps, transposed) <= eps) return eps;
    }
    return 1.0;
  };

  ProkhorovOracleResult result;
  result.pi = infimum(pw, qw, false);
  result.pi_swapped = infimum(qw, pw, false);
  result.pi_transposed = infimum(pw, qw, true);
  result.directions_agree = std::abs(result.pi - result.pi_swapped) <= 1e-9;
  result.transposed_agrees = std::abs(result.pi - result.pi_transposed) <= 1e-9;
  return result;
}

}  // namespace merge_metrics
