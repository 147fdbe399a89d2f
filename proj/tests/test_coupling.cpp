#include <gtest/gtest.h>

#include "merge_metrics/coupling.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/func_kit.hpp"
#include "merge_metrics/prokhorov.hpp"
#include "test_support.hpp"

using namespace merge_metrics;
using mm_test::Rng;

namespace {

SpacePtr line(std::vector<double> xs) {
  Coordinates pts;
  for (double x : xs) pts.push_back({x});
  return make_space(MetricSpace::from_coordinates(pts, MetricKind::Euclidean));
}

SpacePtr random_instance_space(Rng& rng, int trial, std::size_t max_points) {
  const std::size_t n = 1 + rng.index(max_points);
  switch (trial % 3) {
    case 0: return mm_test::random_space(rng, n, 1, true);
    case 1: return mm_test::random_space(rng, n, 2, false);
    default: return mm_test::random_matrix_space(rng, n);
  }
}

// Random joint law: random positive entries normalized.
Coupling random_coupling(Rng& rng, const SpacePtr& s) {
  std::vector<CouplingEntry> entries;
  double total = 0.0;
  const std::size_t count = 1 + rng.index(2 * s->size());
  for (std::size_t k = 0; k < count; ++k) {
    const double m = rng.uniform(0.05, 1.0);
    entries.push_back({rng.index(s->size()), rng.index(s->size()), m});
    total += m;
  }
  for (auto& e : entries) e.mass /= total;
  return Coupling(s, entries);
}

}  // namespace

TEST(Coupling, Validation) {
  const auto s = line({0, 1});
  EXPECT_NO_THROW(Coupling(s, {{0, 1, 0.5}, {1, 1, 0.5}}));
  EXPECT_THROW(Coupling(s, {{0, 1, 0.5}}), NotNormalized);
  EXPECT_THROW(Coupling(s, {{0, 1, 1.5}, {1, 1, -0.5}}), NegativeWeight);
  EXPECT_THROW(Coupling(s, {{0, 2, 1.0}}), Error);
}

TEST(OptimalCoupling, Examples) {
  const auto s = line({0, 0.3, 1});
  const auto p = discrete_measure(s, {0.2, 0.3, 0.5});
  const auto diag = optimal_coupling(p, p);
  EXPECT_EQ(diag.alpha, 0.0);
  for (const auto& e : diag.coupling.entries()) EXPECT_EQ(e.source, e.target);
  EXPECT_LE(diag.coupling.marginal_error(p, p), 1e-15);

  const auto forced = optimal_coupling(point_mass(s, 0), point_mass(s, 1));
  EXPECT_EQ(forced.alpha, 0.3);
  ASSERT_EQ(forced.coupling.entries().size(), 1u);
  EXPECT_EQ(forced.coupling.entries()[0].source, 0u);
  EXPECT_EQ(forced.coupling.entries()[0].target, 1u);
  EXPECT_EQ(forced.coupling.entries()[0].mass, 1.0);

  const auto other = line({0, 2});
  EXPECT_THROW(optimal_coupling(point_mass(s, 0), point_mass(other, 0)), Error);
}

TEST(KyFan, Examples) {
  const auto s = line({0, 0.4, 3});
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 0, 0.5}, {1, 1, 0.5}})), 0.0);
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 1, 1.0}})), 0.4);
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 2, 1.0}})), 1.0);
  // 0.25 of the mass at distance 3: alpha = 0.25 already works.
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 0, 0.75}, {0, 2, 0.25}})), 0.25);
  // 0.5 at distance 0.4 and 0.5 at 3: threshold 0.4 leaves 0.5 beyond.
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 1, 0.5}, {0, 2, 0.5}})), 0.5);
  // Mass tie: gamma{dist > 0.4} = 0 at alpha = 0.4 exactly (closed comparison).
  EXPECT_EQ(ky_fan(Coupling(s, {{0, 1, 0.6}, {1, 1, 0.4}})), 0.4);
}

TEST(KyFan, MatchesScanOverThresholds) {
  Rng rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_instance_space(rng, trial, 8);
    const auto g = random_coupling(rng, s);
    const double a = ky_fan(g);
    EXPECT_LE(g.mass_beyond(a), a + 1e-15);
    // No smaller candidate threshold is feasible.
    std::vector<double> cands{0.0};
    for (const auto& e : g.entries()) {
      cands.push_back(s->dist(e.source, e.target));
      cands.push_back(g.mass_beyond(s->dist(e.source, e.target)));
    }
    cands.push_back(g.mass_beyond(0.0));
    for (double c : cands) {
      if (c < a - 1e-15) EXPECT_GT(g.mass_beyond(c), c) << "trial " << trial;
    }
  }
}

TEST(OptimalCoupling, StrassenEqualityAndMarginals) {
  Rng rng(72);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_instance_space(rng, trial, 12);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    const auto oc = optimal_coupling(p, q);
    EXPECT_NEAR(oc.alpha, prokhorov_distance(p, q).pi, 1e-9) << "trial " << trial;
    EXPECT_EQ(oc.alpha, ky_fan(oc.coupling));
    EXPECT_LE(oc.coupling.marginal_error(p, q), 1e-9) << "trial " << trial;
    const auto again = optimal_coupling(p, q);
    ASSERT_EQ(again.coupling.entries().size(), oc.coupling.entries().size());
    for (std::size_t k = 0; k < oc.coupling.entries().size(); ++k) {
      EXPECT_EQ(again.coupling.entries()[k].mass, oc.coupling.entries()[k].mass);
    }
  }
}

TEST(PropertyA, Examples) {
  const auto s = line({0, 1, 2});
  std::vector<Coupling> diag;
  for (int k = 0; k < 3; ++k) diag.emplace_back(s, std::vector<CouplingEntry>{{static_cast<std::size_t>(k), static_cast<std::size_t>(k), 1.0}});
  const auto r = property_A_check(diag);
  EXPECT_TRUE(r.passed());
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.pi, 0.0);
    EXPECT_EQ(rec.ky_fan, 0.0);
  }

  std::vector<Coupling> forced;
  for (int n = 1; n <= 10; ++n) {
    const double x = n;
    const auto sn = make_space(MetricSpace::from_matrix({{0, 1.0 / n}, {1.0 / n, 0}}, Coordinates{{x}, {x + 1.0 / n}}));
    forced.emplace_back(sn, std::vector<CouplingEntry>{{0, 1, 1.0}});
  }
  const auto rf = property_A_check(forced);
  EXPECT_TRUE(rf.passed());
  for (std::size_t k = 0; k < rf.records.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    EXPECT_EQ(rf.records[k].ky_fan, std::min(1.0, 1.0 / n));
    EXPECT_EQ(rf.records[k].pi, std::min(1.0, 1.0 / n));
  }
}

TEST(PropertyA, RandomCouplings) {
  Rng rng(73);
  std::vector<Coupling> seq;
  for (int trial = 0; trial < 300; ++trial) seq.push_back(random_coupling(rng, random_instance_space(rng, trial, 8)));
  const auto r = property_A_check(seq);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.records.size(), seq.size());
}

TEST(CouplingTailBound, HoldsExactlyForOptimalCouplings) {
  Rng rng(74);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_instance_space(rng, trial, 9);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    std::vector<double> v(s->size());
    for (auto& x : v) x = rng.uniform(-1.5, 1.5);
    const auto f = FunctionOnSpace::tabulated(s, v);
    const double eps = rng.uniform(0.0, 1.5);
    const auto g = trial % 2 ? optimal_coupling(p, q).coupling : random_coupling(rng, s);
    const auto pg = first_marginal_measure(g);
    const auto qg = second_marginal_measure(g);
    const double lhs = std::abs(integrate(f, signed_diff(pg, qg)));
    const double rhs = 2 * f.sup_norm() * g.mass_beyond(eps) + empirical_modulus(f, eps);
    EXPECT_LE(lhs, rhs) << "trial " << trial;
  }
}
