#include <gtest/gtest.h>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/metric_space.hpp"
#include "test_support.hpp"

using namespace merge_metrics;
using mm_test::Rng;

namespace {

SpacePtr line(std::vector<double> xs) {
  Coordinates pts;
  for (double x : xs) pts.push_back({x});
  return make_space(MetricSpace::from_coordinates(pts, MetricKind::Euclidean));
}

}  // namespace

TEST(MetricSpace, EuclideanLine) {
  const auto s = line({0, 1, 3});
  EXPECT_EQ(s->dist(0, 2), 3.0);
  EXPECT_EQ(s->dist(2, 0), 3.0);
  EXPECT_EQ(s->diameter(), 3.0);
  EXPECT_TRUE(s->is_real_line());
  EXPECT_EQ(s->realized_distances(), (std::vector<double>{1, 2, 3}));
}

TEST(MetricSpace, DiscreteMetric) {
  const auto s = make_space(MetricSpace::discrete(4));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(s->dist(i, j), i == j ? 0.0 : 1.0);
  }
  EXPECT_FALSE(s->is_real_line());
}

TEST(MetricSpace, L1AndEuclideanInPlane) {
  const Coordinates pts{{0, 0}, {3, 4}};
  EXPECT_EQ(MetricSpace::from_coordinates(pts, MetricKind::Euclidean).dist(0, 1), 5.0);
  EXPECT_EQ(MetricSpace::from_coordinates(pts, MetricKind::L1).dist(0, 1), 7.0);
}

TEST(MetricSpace, TriangleViolationNamesTriple) {
  // a=0, b=1, c=2 with d(a,c)=5, d(a,b)=d(b,c)=1.
  const std::vector<std::vector<double>> m{{0, 1, 5}, {1, 0, 1}, {5, 1, 0}};
  try {
    (void)MetricSpace::from_matrix(m);
    FAIL() << "expected AxiomViolation";
  } catch (const AxiomViolation& e) {
    EXPECT_EQ(e.axiom(), "triangle");
    EXPECT_EQ(e.kind(), "AxiomViolation");
    const std::set<std::size_t> triple{e.i(), e.j(), e.k()};
    EXPECT_EQ(triple, (std::set<std::size_t>{0, 1, 2}));
  }
}

TEST(MetricSpace, RejectsAsymmetry) {
  const std::vector<std::vector<double>> m{{0, 1}, {2, 0}};
  EXPECT_THROW((void)MetricSpace::from_matrix(m), NonSymmetric);
}

TEST(MetricSpace, RejectsBadEntries) {
  EXPECT_THROW((void)MetricSpace::from_matrix({{0, -1}, {-1, 0}}), AxiomViolation);
  EXPECT_THROW((void)MetricSpace::from_matrix({{1, 1}, {1, 0}}), AxiomViolation);
  EXPECT_THROW((void)MetricSpace::from_matrix({{0, 0}, {0, 0}}), AxiomViolation);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW((void)MetricSpace::from_matrix({{0, inf}, {inf, 0}}), AxiomViolation);
  EXPECT_THROW((void)MetricSpace::from_coordinates({{0.5}, {0.5}}, MetricKind::Euclidean), AxiomViolation);
  EXPECT_THROW((void)MetricSpace::from_matrix({{0, 1}}), Error);
}

TEST(MetricSpace, MetricNames) {
  EXPECT_EQ(metric_kind_from_string("l1"), MetricKind::L1);
  EXPECT_EQ(to_string(MetricKind::Matrix), "matrix");
  EXPECT_THROW((void)metric_kind_from_string("cosine"), Error);
}

TEST(MetricSpace, MatrixRoundTripIsBitExact) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = mm_test::random_space(rng, 2 + rng.index(9), 1 + rng.index(3), trial % 2 == 0,
                                         trial % 3 == 0 ? MetricKind::L1 : MetricKind::Euclidean);
    const auto m = s->distance_matrix();
    const auto copy = MetricSpace::from_matrix(m);
    EXPECT_EQ(copy.distance_matrix(), m);
  }
}

TEST(PointSet, DistToSet) {
  const auto s = line({0, 1, 3});
  const PointSet k(s, {0, 1});
  EXPECT_EQ(dist_to_set(0, k), 0.0);
  EXPECT_EQ(dist_to_set(3 - 1, k), 2.0);
  EXPECT_THROW((void)dist_to_set(0, PointSet(s, {})), Error);
}

TEST(PointSet, EpsNeighborhood) {
  const auto s = line({0, 1, 3});
  const PointSet a(s, {0});
  EXPECT_EQ(eps_neighborhood(a, 0.0), a);
  EXPECT_EQ(eps_neighborhood(a, 1.0).members(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(eps_neighborhood(a, s->diameter()), PointSet::all(s));
  try {
    (void)eps_neighborhood(PointSet(s, {}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "EmptySet");
  }
}

TEST(PointSet, MembersSortedAndUnique) {
  const auto s = line({0, 1, 3});
  const PointSet a(s, {2, 0, 2});
  EXPECT_EQ(a.members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_THROW(PointSet(s, {3}), Error);
}

TEST(PointSet, RandomNeighborhoodMonotoneAndDistLipschitz) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = trial % 2 ? mm_test::random_matrix_space(rng, 2 + rng.index(9))
                             : mm_test::random_space(rng, 2 + rng.index(9), 1 + rng.index(3), trial % 4 == 0);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (rng.coin(0.4)) members.push_back(i);
    }
    if (members.empty()) members.push_back(0);
    const PointSet k(s, members);
    for (std::size_t x = 0; x < s->size(); ++x) {
      for (std::size_t y = 0; y < s->size(); ++y) {
        EXPECT_LE(std::abs(dist_to_set(x, k) - dist_to_set(y, k)), s->dist(x, y));
      }
    }
    const double e1 = rng.uniform(0.0, 1.5);
    const double e2 = e1 + rng.uniform(0.0, 1.0);
    const auto n1 = eps_neighborhood(k, e1);
    const auto n2 = eps_neighborhood(k, e2);
    for (auto x : n1.members()) EXPECT_TRUE(n2.contains(x));
    for (auto x : k.members()) EXPECT_TRUE(n1.contains(x));
  }
}
