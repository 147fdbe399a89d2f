#include <gtest/gtest.h>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/flow.hpp"
#include "merge_metrics/linear_program.hpp"
#include "test_support.hpp"

using namespace merge_metrics;
using mm_test::Rng;

namespace {

std::string kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return "none";
}

void expect_flow_witness_valid(const FlowProblem& pb, const FlowResult& r) {
  std::vector<double> out(pb.supplies.size(), 0.0), in(pb.demands.size(), 0.0);
  double total = 0.0;
  for (const auto& arc : r.arcs) {
    EXPECT_GT(arc.amount, 0.0);
    bool admissible = false;
    for (const auto& e : pb.edges) admissible = admissible || (e.first == arc.source && e.second == arc.sink);
    EXPECT_TRUE(admissible);
    out[arc.source] += arc.amount;
    in[arc.sink] += arc.amount;
    total += arc.amount;
  }
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_LE(out[i], pb.supplies[i] + 1e-12);
  for (std::size_t j = 0; j < in.size(); ++j) EXPECT_LE(in[j], pb.demands[j] + 1e-12);
  EXPECT_NEAR(total, r.value, 1e-12);
}

}  // namespace

TEST(MaxFlow, Examples) {
  FlowProblem full{{0.25, 0.75}, {0.5, 0.5}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  EXPECT_NEAR(max_flow(full).value, 1.0, 1e-12);

  FlowProblem none{{0.5, 0.5}, {0.5, 0.5}, {}};
  EXPECT_EQ(max_flow(none).value, 0.0);
  EXPECT_TRUE(max_flow(none).arcs.empty());

  FlowProblem single{{0.5, 0.5}, {0.5, 0.5}, {{0, 0}}};
  const auto r = max_flow(single);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  const auto m = r.matrix(2, 2);
  EXPECT_NEAR(m[0][0], 0.5, 1e-12);
  EXPECT_EQ(m[1][1], 0.0);
}

TEST(MaxFlow, Malformed) {
  EXPECT_EQ(kind_of([] { (void)max_flow({{0.5, 0.6}, {1.0}, {}}); }), "MalformedProblem");
  EXPECT_EQ(kind_of([] { (void)max_flow({{1.5, -0.5}, {1.0}, {}}); }), "MalformedProblem");
  EXPECT_EQ(kind_of([] { (void)max_flow({{1.0}, {1.0}, {{0, 1}}}); }), "MalformedProblem");
}

TEST(MaxFlow, MatchesCutEnumeration) {
  Rng rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t a = 1 + rng.index(8);
    const std::size_t b = 1 + rng.index(8);
    FlowProblem pb;
    pb.supplies = mm_test::random_weights(rng, a, 0.2);
    pb.demands = mm_test::random_weights(rng, b, 0.2);
    const double density = rng.uniform(0.1, 0.9);
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        if (rng.coin(density)) pb.edges.emplace_back(i, j);
      }
    }
    const auto r = max_flow(pb);
    EXPECT_NEAR(r.value, mm_test::min_cut_bound(pb), 1e-12) << "trial " << trial;
    expect_flow_witness_valid(pb, r);
  }
}

TEST(SolveLp, Examples) {
  LinearProgram one;
  one.objective = {1.0};
  one.add_row({1.0}, 3.0);
  EXPECT_NEAR(solve_lp(one).optimum, 3.0, 1e-12);

  LinearProgram two;
  two.objective = {1.0, 1.0};
  two.upper = {1.0, 1.0};
  two.add_row({1.0, 1.0}, 1.0);
  const auto s = solve_lp(two);
  EXPECT_NEAR(s.optimum, 1.0, 1e-12);
  EXPECT_NEAR(s.witness[0] + s.witness[1], 1.0, 1e-12);
}

TEST(SolveLp, FreeAndReflectedVariables) {
  // maximize -x - y with x free, y <= 2 (no lower), x >= -4, x + y >= -1.
  LinearProgram lp;
  lp.objective = {-1.0, -1.0};
  lp.lower = {-kInfinity, -kInfinity};
  lp.upper = {kInfinity, 2.0};
  lp.add_row({-1.0, 0.0}, 4.0);
  lp.add_row({-1.0, -1.0}, 1.0);
  const auto s = solve_lp(lp);
  EXPECT_NEAR(s.optimum, 1.0, 1e-12);
  EXPECT_NEAR(s.witness[0] + s.witness[1], -1.0, 1e-12);
}

TEST(SolveLp, Errors) {
  LinearProgram infeasible;
  infeasible.objective = {1.0};
  infeasible.add_row({1.0}, -1.0);
  EXPECT_EQ(kind_of([&] { (void)solve_lp(infeasible); }), "Infeasible");

  LinearProgram unbounded;
  unbounded.objective = {1.0, 0.0};
  unbounded.add_row({0.0, 1.0}, 1.0);
  EXPECT_EQ(kind_of([&] { (void)solve_lp(unbounded); }), "Unbounded");

  LinearProgram empty;
  EXPECT_EQ(kind_of([&] { (void)solve_lp(empty); }), "MalformedProblem");

  LinearProgram nan_row;
  nan_row.objective = {1.0};
  nan_row.add_row({std::nan("")}, 1.0);
  EXPECT_EQ(kind_of([&] { (void)solve_lp(nan_row); }), "MalformedProblem");
}

TEST(SolveLp, DegenerateIsDeterministic) {
  // Many tight constraints at the optimum vertex.
  LinearProgram lp;
  lp.objective = {1.0, 1.0, 1.0};
  lp.upper = {1.0, 1.0, 1.0};
  lp.add_row({1.0, 1.0, 0.0}, 1.0);
  lp.add_row({0.0, 1.0, 1.0}, 1.0);
  lp.add_row({1.0, 0.0, 1.0}, 1.0);
  lp.add_row({1.0, 1.0, 1.0}, 1.5);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  EXPECT_NEAR(a.optimum, 1.5, 1e-12);
  EXPECT_EQ(a.witness, b.witness);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveLp, MatchesVertexEnumeration) {
  Rng rng(32);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LinearProgram lp;
    const std::size_t n = 4;
    lp.objective.resize(n);
    for (auto& c : lp.objective) c = std::round(rng.uniform(-5, 5) * 4) / 4;
    lp.lower.resize(n);
    lp.upper.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      lp.lower[j] = -std::round(rng.uniform(0, 3));
      lp.upper[j] = lp.lower[j] + 1 + std::round(rng.uniform(0, 4));
    }
    const std::size_t m = 2 + rng.index(5);
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<double> row(n);
      for (auto& a : row) a = rng.coin(0.3) ? 0.0 : std::round(rng.uniform(-4, 4));
      lp.add_row(row, std::round(rng.uniform(-3, 6)));
    }
    const double oracle = mm_test::lp_vertex_enumeration(lp);
    if (std::isinf(oracle)) {
      EXPECT_EQ(kind_of([&] { (void)solve_lp(lp); }), "Infeasible") << "trial " << trial;
      continue;
    }
    ++compared;
    const auto s = solve_lp(lp);
    EXPECT_NEAR(s.optimum, oracle, 1e-9) << "trial " << trial;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      obj += lp.objective[j] * s.witness[j];
      EXPECT_GE(s.witness[j], lp.lower[j] - 1e-9);
      EXPECT_LE(s.witness[j], lp.upper[j] + 1e-9);
    }
    EXPECT_NEAR(obj, s.optimum, 1e-9);
    for (std::size_t r = 0; r < m; ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += lp.rows[r][j] * s.witness[j];
      EXPECT_LE(lhs, lp.rhs[r] + 1e-9);
    }
  }
  EXPECT_GT(compared, 100);
}
