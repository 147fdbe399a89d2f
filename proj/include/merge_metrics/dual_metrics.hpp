#pragma once

#include <optional>
#include <string>
#include <vector>

#include "merge_metrics/function.hpp"
#include "merge_metrics/measures.hpp"

namespace merge_metrics {

/// Function classes whose integral suprema are computed here.
struct FunctionClassSpec {
  enum class Kind {
    BLUnit,  // ||f||_L + ||f||_inf <= 1
    FOne,    // ||f||_inf <= 1, ||f||_L <= 1
    FEps,    // ||f||_inf <= 1, ||f||_L <= 1/eps
    FOmega,  // ||f||_inf <= bound, |f(x) - f(y)| <= omega(d) + slack_k * d
  };

  Kind kind = Kind::FOne;
  double eps = 1.0;
  std::optional<Modulus> modulus;
  double bound = 1.0;
  double slack_k = 0.0;

  static FunctionClassSpec bl_unit();
  static FunctionClassSpec f_one();
  static FunctionClassSpec f_eps(double eps);
  static FunctionClassSpec f_omega(Modulus modulus, double bound = 1.0, double slack_k = 0.0);

  /// Parses "BL", "F1" or "Feps:<eps>".
  static FunctionClassSpec parse(const std::string& text);
  /// Inverse of `parse` for the three named classes; "Fomega" otherwise.
  std::string label() const;
};

struct DualResult {
  double value = 0.0;
  /// Tabulated over the whole space; attains `value` against p - q.
  FunctionOnSpace witness;
  /// Lipschitz and sup-norm budgets chosen by the optimizer (BL class only).
  std::optional<double> lipschitz_budget;
  std::optional<double> sup_budget;
};

/// Bounded-Lipschitz distance. Real-line spaces with more than
/// kLineSupportThreshold support points use the exact chain solver; all other
/// inputs are solved as a dense LP over the support.
inline constexpr std::size_t kLineSupportThreshold = 24;
DualResult beta_distance(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// LP route: maximize sum f_i (p_i - q_i) over |f_i| <= M,
/// |f_i - f_j| <= L dist(i, j), L + M <= 1, L, M >= 0.
DualResult beta_distance_lp(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Real-line route. On the line the pairwise Lipschitz constraints reduce to
/// neighbouring points, so for a fixed split (L, M) the supremum is a chain
/// problem solved by a concave piecewise-linear recursion; the value is
/// concave in L along L + M = 1 and maximized by golden-section search.
DualResult beta_distance_line(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// sup sum psi_i f_i over |f_i| <= sup_budget and
/// |f_{i+1} - f_i| <= lipschitz_budget * gaps[i]. Points are in chain order;
/// gaps.size() == psi.size() - 1. Optionally returns a maximizer.
double chain_sup(const std::vector<double>& psi, const std::vector<double>& gaps,
                 double lipschitz_budget, double sup_budget, std::vector<double>* witness = nullptr);

/// sup |integral f d(p - q)| over |f| <= bound and
/// |f(x) - f(y)| <= omega(dist) + slack_k * dist, with omega evaluated at the
/// realized distances only. Solved as two LPs (one per sign).
DualResult omega_sup(const DiscreteMeasure& p, const DiscreteMeasure& q, const Modulus& omega,
                     double bound = 1.0, double slack_k = 0.0);

/// Dispatches on the class. F1 and Feps on real-line spaces with more than
/// kLineSupportThreshold support points go through chain_sup (one call per
/// sign); everything else through beta_distance or omega_sup.
DualResult class_sup(const DiscreteMeasure& p, const DiscreteMeasure& q, const FunctionClassSpec& spec);

/// Checks the witness against its class constraints on every pair of
/// support points, within `tolerance`.
bool witness_feasible(const DualResult& result, const FunctionClassSpec& spec,
                      const DiscreteMeasure& p, const DiscreteMeasure& q, double tolerance = 1e-9);

}  // namespace merge_metrics
