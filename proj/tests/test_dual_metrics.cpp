#include <gtest/gtest.h>

#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"
#include "merge_metrics/linear_program.hpp"
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
    case 0: return mm_test::random_space(rng, n, 1, trial % 2 == 0);
    case 1: return mm_test::random_space(rng, n, 2, false);
    default: return mm_test::random_matrix_space(rng, n);
  }
}

void expect_witness_attains(const DualResult& r, const DiscreteMeasure& p, const DiscreteMeasure& q) {
  EXPECT_NEAR(integrate(r.witness, signed_diff(p, q)), r.value, 1e-9);
}

double beta_by_vertices(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  return mm_test::lp_vertex_enumeration(mm_test::full_beta_lp(p, q));
}

// sup of |integral f d(p - q)| over |f| <= bound, |f_i - f_j| <= omega(d_ij),
// with every pair row present.
double full_omega_value(const DiscreteMeasure& p, const DiscreteMeasure& q, const Modulus& omega, double bound) {
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0 || q[i] > 0) pts.push_back(i);
  }
  const std::size_t k = pts.size();
  LinearProgram lp;
  lp.lower.assign(k, -bound);
  lp.upper.assign(k, bound);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<double> row(k, 0.0);
      row[i] = 1;
      row[j] = -1;
      lp.add_row(row, omega(p.space()->dist(pts[i], pts[j])));
    }
  }
  double best = 0.0;
  for (double sign : {1.0, -1.0}) {
    lp.objective.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) lp.objective[i] = sign * (p[pts[i]] - q[pts[i]]);
    best = std::max(best, solve_lp(lp).optimum);
  }
  return best;
}

}  // namespace

TEST(Modulus, Interpolation) {
  const Modulus w({{1.0, 2.0}, {3.0, 3.0}}, Modulus::Tail::Constant);
  EXPECT_EQ(w(0.0), 0.0);
  EXPECT_EQ(w(0.5), 1.0);
  EXPECT_EQ(w(2.0), 2.5);
  EXPECT_EQ(w(10.0), 3.0);
  const Modulus lin({{1.0, 2.0}, {3.0, 3.0}}, Modulus::Tail::Linear);
  EXPECT_EQ(lin(5.0), 4.0);
  EXPECT_EQ(Modulus::linear(0.5)(3.0), 1.5);
  EXPECT_EQ(Modulus::zero()(7.0), 0.0);
  // Vanishing on an initial segment is representable.
  const Modulus late({{0.5, 0.0}, {1.0, 1.0}}, Modulus::Tail::Constant);
  EXPECT_EQ(late(0.25), 0.0);
  EXPECT_EQ(late(0.75), 0.5);
}

TEST(Modulus, Validation) {
  auto kind = [](std::vector<std::pair<double, double>> knots) {
    try {
      Modulus m(std::move(knots), Modulus::Tail::Constant);
    } catch (const Error& e) {
      return e.kind();
    }
    return std::string("none");
  };
  EXPECT_EQ(kind({}), "InvalidModulus");
  EXPECT_EQ(kind({{0.0, 1.0}, {1.0, 1.0}}), "InvalidModulus");
  EXPECT_EQ(kind({{1.0, 2.0}, {2.0, 1.0}}), "InvalidModulus");
  EXPECT_EQ(kind({{1.0, 1.0}, {1.0, 2.0}}), "InvalidModulus");
  EXPECT_EQ(kind({{-1.0, 1.0}}), "InvalidModulus");
  EXPECT_EQ(kind({{0.0, 0.0}, {1.0, 1.0}}), "none");
}

TEST(FunctionClassSpec, ParseAndLabel) {
  EXPECT_EQ(FunctionClassSpec::parse("BL").kind, FunctionClassSpec::Kind::BLUnit);
  EXPECT_EQ(FunctionClassSpec::parse("F1").kind, FunctionClassSpec::Kind::FOne);
  const auto e = FunctionClassSpec::parse("Feps:0.2");
  EXPECT_EQ(e.kind, FunctionClassSpec::Kind::FEps);
  EXPECT_EQ(e.eps, 0.2);
  EXPECT_EQ(FunctionClassSpec::parse(e.label()).eps, 0.2);
  EXPECT_THROW(FunctionClassSpec::parse("Feps:x"), Error);
  EXPECT_THROW(FunctionClassSpec::parse("Feps:-1"), Error);
  EXPECT_THROW(FunctionClassSpec::parse("W2"), Error);
}

TEST(Beta, Examples) {
  const auto s = line({0, 0.5});
  const auto p = point_mass(s, 0);
  EXPECT_EQ(beta_distance(p, p).value, 0.0);
  for (double d : {0.1, 0.5, 1.0, 2.0, 3.0, 10.0}) {
    const auto sd = line({0, d});
    const auto a = point_mass(sd, 0);
    const auto b = point_mass(sd, 1);
    const auto r = beta_distance(a, b);
    EXPECT_NEAR(r.value, 2 * d / (d + 2), 1e-12) << d;
    EXPECT_NEAR(beta_distance_line(a, b).value, 2 * d / (d + 2), 1e-10) << d;
    expect_witness_attains(r, a, b);
    EXPECT_TRUE(witness_feasible(r, FunctionClassSpec::bl_unit(), a, b));
  }
  const auto s2 = line({0, 2});
  EXPECT_NEAR(beta_distance(point_mass(s2, 0), point_mass(s2, 1)).value, 1.0, 1e-12);
}

TEST(Beta, MatchesVertexEnumeration) {
  Rng rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = random_instance_space(rng, trial, 3);
    const auto p = mm_test::random_measure(rng, s, 0.1);
    const auto q = mm_test::random_measure(rng, s, 0.1);
    EXPECT_NEAR(beta_distance(p, q).value, beta_by_vertices(p, q), 1e-9) << "trial " << trial;
  }
}

TEST(Beta, LineSolverMatchesLp) {
  Rng rng(52);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.index(30);
    const auto s = mm_test::random_space(rng, n, 1, trial % 2 == 0);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    const auto lp = beta_distance_lp(p, q);
    const auto chain = beta_distance_line(p, q);
    EXPECT_NEAR(chain.value, lp.value, 1e-9) << "trial " << trial;
    expect_witness_attains(chain, p, q);
    EXPECT_TRUE(witness_feasible(chain, FunctionClassSpec::bl_unit(), p, q)) << "trial " << trial;
  }
}

TEST(Beta, LazyPairsMatchFullProgram) {
  Rng rng(54);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.index(30);
    const auto s = trial % 2 ? mm_test::random_space(rng, n, 2, false) : mm_test::random_matrix_space(rng, n);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    const auto lazy = beta_distance_lp(p, q);
    EXPECT_NEAR(lazy.value, std::max(solve_lp(mm_test::full_beta_lp(p, q)).optimum, 0.0), 1e-9) << "trial " << trial;
    expect_witness_attains(lazy, p, q);
    EXPECT_TRUE(witness_feasible(lazy, FunctionClassSpec::bl_unit(), p, q)) << "trial " << trial;

    const Modulus omega({{0.5, 0.4}, {2.0, 0.7}}, Modulus::Tail::Constant);
    const auto lazy_omega = omega_sup(p, q, omega, 0.8);
    EXPECT_NEAR(lazy_omega.value, full_omega_value(p, q, omega, 0.8), 1e-9) << "trial " << trial;
  }
}

TEST(ClassSup, LineRouteMatchesLp) {
  Rng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 26 + rng.index(20);
    const auto s = mm_test::random_space(rng, n, 1, trial % 2 == 0);
    const auto p = mm_test::random_measure(rng, s, 0.0);
    const auto q = mm_test::random_measure(rng, s, 0.0);
    for (const char* label : {"F1", "Feps:0.3"}) {
      const auto spec = FunctionClassSpec::parse(label);
      const auto routed = class_sup(p, q, spec);
      const double lip = spec.kind == FunctionClassSpec::Kind::FOne ? 1.0 : 1.0 / spec.eps;
      EXPECT_NEAR(routed.value, omega_sup(p, q, Modulus::linear(lip), 1.0).value, 1e-9) << label << " trial " << trial;
      expect_witness_attains(routed, p, q);
      EXPECT_TRUE(witness_feasible(routed, spec, p, q)) << label << " trial " << trial;
    }
  }
}

TEST(ChainSup, MatchesLp) {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(trial % 2 ? 12 : 40);
    std::vector<double> psi(n), gaps(n - 1);
    for (auto& x : psi) x = rng.coin(0.2) ? 0.0 : rng.uniform(-1, 1);
    for (auto& g : gaps) g = rng.coin(0.2) ? 0.125 : rng.uniform(0.01, 2.0);
    const double lip = rng.coin(0.1) ? 0.0 : rng.uniform(0.0, 3.0);
    const double sup = rng.coin(0.1) ? 0.0 : rng.uniform(0.0, 2.0);

    LinearProgram lp;
    lp.objective = psi;
    lp.lower.assign(n, -sup);
    lp.upper.assign(n, sup);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::vector<double> row(n, 0.0);
      row[i] = 1;
      row[i + 1] = -1;
      lp.add_row(row, lip * gaps[i]);
      row[i] = -1;
      row[i + 1] = 1;
      lp.add_row(row, lip * gaps[i]);
    }
    const double expected = solve_lp(lp).optimum;
    std::vector<double> witness;
    const double got = chain_sup(psi, gaps, lip, sup, &witness);
    EXPECT_NEAR(got, expected, 1e-10) << "trial " << trial;
    double attained = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      attained += psi[i] * witness[i];
      EXPECT_LE(std::abs(witness[i]), sup + 1e-12);
      if (i + 1 < n) EXPECT_LE(std::abs(witness[i + 1] - witness[i]), lip * gaps[i] + 1e-12);
    }
    EXPECT_NEAR(attained, got, 1e-10) << "trial " << trial;
  }
}

TEST(ChainSup, Errors) {
  EXPECT_THROW(chain_sup({}, {}, 1, 1), Error);
  EXPECT_THROW(chain_sup({1, 2}, {}, 1, 1), Error);
  EXPECT_THROW(chain_sup({1}, {}, -1, 1), Error);
}

TEST(OmegaSup, Examples) {
  const auto s = line({0, 0.3, 4});
  const auto a = point_mass(s, 0);
  const auto b = point_mass(s, 1);
  const auto c = point_mass(s, 2);
  const Modulus sq({{1.0, 1.0}, {2.0, 4.0}}, Modulus::Tail::Linear);
  for (const auto& [q, d] : {std::pair{b, 0.3}, std::pair{c, 4.0}}) {
    EXPECT_NEAR(omega_sup(a, q, sq).value, std::min(2.0, sq(d)), 1e-12);
    EXPECT_NEAR(omega_sup(a, q, sq, 0.5).value, std::min(1.0, sq(d)), 1e-12);
    EXPECT_EQ(omega_sup(a, q, Modulus::zero()).value, 0.0);
  }
  EXPECT_NEAR(class_sup(a, b, FunctionClassSpec::f_one()).value, 0.3, 1e-12);
  EXPECT_EQ(class_sup(a, a, FunctionClassSpec::f_one()).value, 0.0);
  EXPECT_NEAR(class_sup(a, b, FunctionClassSpec::f_eps(0.2)).value, 1.5, 1e-12);
  EXPECT_NEAR(omega_sup(a, b, Modulus::linear(1.0), 1.0, 2.0).value, 0.9, 1e-12);
}

TEST(OmegaSup, SignChoiceNegatesWitness) {
  // psi = q-heavy on the left: the maximizing f is decreasing.
  const auto s = line({0, 1});
  const auto p = point_mass(s, 1);
  const auto q = point_mass(s, 0);
  const auto r = class_sup(p, q, FunctionClassSpec::f_one());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  expect_witness_attains(r, p, q);
}

TEST(DualMetrics, SpaceMismatch) {
  const auto a = line({0, 1});
  const auto b = line({0, 2});
  EXPECT_THROW(beta_distance(point_mass(a, 0), point_mass(b, 0)), Error);
  EXPECT_THROW(omega_sup(point_mass(a, 0), point_mass(b, 0), Modulus::linear(1)), Error);
}

TEST(DualMetrics, RandomClassRelations) {
  Rng rng(54);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_instance_space(rng, trial, 8);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    const auto beta = beta_distance(p, q);
    const auto f1 = class_sup(p, q, FunctionClassSpec::f_one());
    const auto lin = omega_sup(p, q, Modulus::linear(1.0), 1.0);
    // BL unit ball is inside F1, which is inside twice the BL unit ball.
    EXPECT_LE(beta.value, f1.value + 1e-9);
    EXPECT_LE(f1.value, 2 * beta.value + 1e-9);
    EXPECT_NEAR(lin.value, f1.value, 1e-9);
    EXPECT_LE(beta.value, 2.0 + 1e-12);

    const double e1 = rng.uniform(0.05, 1.0);
    const double e2 = e1 + rng.uniform(0.0, 1.0);
    const auto fe1 = class_sup(p, q, FunctionClassSpec::f_eps(e1));
    const auto fe2 = class_sup(p, q, FunctionClassSpec::f_eps(e2));
    EXPECT_GE(fe1.value, fe2.value - 1e-9);

    const Modulus w1({{0.5, 0.3}, {1.0, 0.6}}, Modulus::Tail::Linear);
    const Modulus w2({{0.5, 0.4}, {1.0, 0.9}}, Modulus::Tail::Linear);
    EXPECT_LE(omega_sup(p, q, w1).value, omega_sup(p, q, w2).value + 1e-9);

    for (const auto& [r, spec] : {std::pair{beta, FunctionClassSpec::bl_unit()},
                                  std::pair{f1, FunctionClassSpec::f_one()},
                                  std::pair{fe1, FunctionClassSpec::f_eps(e1)}}) {
      EXPECT_TRUE(witness_feasible(r, spec, p, q)) << "trial " << trial;
      expect_witness_attains(r, p, q);
    }
    const auto fw = class_sup(p, q, FunctionClassSpec::f_omega(w1, 0.7, 0.1));
    EXPECT_TRUE(witness_feasible(fw, FunctionClassSpec::f_omega(w1, 0.7, 0.1), p, q));
    expect_witness_attains(fw, p, q);
  }
}

TEST(DualMetrics, PiBoundedByTwoSqrtBeta) {
  Rng rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_instance_space(rng, trial, 9);
    const auto p = mm_test::random_measure(rng, s);
    const auto q = mm_test::random_measure(rng, s);
    const double pi = prokhorov_distance(p, q).pi;
    const double beta = beta_distance(p, q).value;
    EXPECT_LE(pi, 2 * std::sqrt(beta) + 1e-7) << "trial " << trial;
  }
}
