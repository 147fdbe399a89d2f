#include "merge_metrics/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr double kCostTolerance = 1e-11;
constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kPerturbation = 1e-9;
constexpr std::size_t kDegenerateRun = 50;
constexpr std::size_t kCleanupRounds = 8;

// x_j = offset + sum over its columns of sign * y_col, y >= 0.
struct VariableMap {
  double offset = 0.0;
  std::size_t column = 0;
  double sign = 1.0;
  bool split = false;  // free variable: x = offset + y_col - y_{col+1}
};

// Deterministic value in [0, 1) per row, used to break degeneracy.
double row_jitter(std::size_t r) {
  std::uint64_t z = static_cast<std::uint64_t>(r) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Dense tableau B^-1 [A | b] over the standard form A y = b, y >= 0. The
// original rows are kept so the tableau can be rebuilt from the current
// basis when rounding has accumulated.
class Tableau {
 public:
  Tableau(std::vector<double> original, std::vector<std::size_t> basis, std::size_t cols)
      : rows_(basis.size()), cols_(cols), original_(std::move(original)), cells_(original_), basis_(std::move(basis)),
        cost_(cols, 0.0), reduced_(cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  // Replaces the right-hand side of the original rows (before the basis
  // inverse is applied) and rebuilds.
  void set_original_rhs(const std::vector<double>& b) {
    for (std::size_t r = 0; r < rows_; ++r) original_[r * (cols_ + 1) + cols_] = b[r];
    reinvert();
  }

  void set_cost(std::vector<double> cost) {
    cost_ = std::move(cost);
    refresh_reduced();
  }

  double objective_value() const {
    double z = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) z += cost_[basis_[r]] * rhs(r);
    return z;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t c = 0; c <= cols_; ++c) at(row, c) /= p;
    at(row, col) = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      const double factor = at(r, col);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(row, c);
      at(r, col) = 0.0;
    }
    const double factor = reduced_[col];
    if (factor != 0.0) {
      for (std::size_t c = 0; c < cols_; ++c) reduced_[c] -= factor * at(row, c);
      reduced_[col] = 0.0;
    }
    basis_[row] = col;
    if (++since_reinvert_ >= 4 * rows_ + 64) reinvert();
  }

  // Rebuilds B^-1 [A | b] from the original rows by Gauss-Jordan elimination
  // over the basic columns with partial pivoting, then the reduced costs.
  void reinvert() {
    since_reinvert_ = 0;
    cells_ = original_;
    std::vector<std::size_t> columns = basis_;
    std::vector<bool> placed(rows_, false);
    for (std::size_t col : columns) {
      std::size_t best = rows_;
      double best_abs = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!placed[r] && std::abs(at(r, col)) > best_abs) {
          best = r;
          best_abs = std::abs(at(r, col));
        }
      }
      if (best == rows_ || best_abs < 1e-14) throw Error("NumericalFailure", "simplex basis became singular");
      placed[best] = true;
      basis_[best] = col;
      const double p = at(best, col);
      for (std::size_t c = 0; c <= cols_; ++c) at(best, c) /= p;
      at(best, col) = 1.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r == best) continue;
        const double factor = at(r, col);
        if (factor == 0.0) continue;
        for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(best, c);
        at(r, col) = 0.0;
      }
    }
    refresh_reduced();
  }

  // Primal simplex over entering columns [0, allowed). The entering column is
  // the one with the largest reduced cost (lowest index on ties); after
  // kDegenerateRun consecutive pivots without objective progress, Bland's
  // rule (lowest improving index) takes over until progress resumes.
  // Returns false when the program is unbounded in an entering direction.
  bool optimize(std::size_t allowed, std::size_t& iterations, std::size_t cap) {
    std::size_t stalled = 0;
    while (true) {
      const bool bland = stalled >= kDegenerateRun;
      std::size_t entering = allowed;
      double best_cost = kCostTolerance;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (reduced_[c] > best_cost) {
          entering = c;
          if (bland) break;
          best_cost = reduced_[c];
        }
      }
      if (entering == allowed) return true;
      std::size_t leaving = rows_;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, entering);
        if (a <= kPivotTolerance) continue;
        const double ratio = std::max(rhs(r), 0.0) / a;
        const double tie = 1e-12 * (1.0 + best_ratio);
        if (leaving == rows_ || ratio < best_ratio - tie) {
          leaving = r;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + tie && basis_[r] < basis_[leaving]) {
          leaving = r;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leaving == rows_) return false;
      count(iterations, cap);
      stalled = best_ratio * reduced_[entering] > kCostTolerance * kPivotTolerance ? 0 : stalled + 1;
      pivot(leaving, entering);
    }
  }

  // Dual simplex over entering columns [0, allowed), starting from a basis
  // whose reduced costs are all nonpositive. Returns false when some row
  // proves the program infeasible.
  bool restore_feasibility(std::size_t allowed, std::size_t& iterations, std::size_t cap) {
    while (true) {
      std::size_t leaving = rows_;
      double worst = -kPivotTolerance;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (rhs(r) < worst) {
          leaving = r;
          worst = rhs(r);
        }
      }
      if (leaving == rows_) return true;
      std::size_t entering = allowed;
      double best_ratio = 0.0;
      for (std::size_t c = 0; c < allowed; ++c) {
        const double a = at(leaving, c);
        if (a >= -kPivotTolerance) continue;
        const double ratio = std::max(-reduced_[c], 0.0) / -a;
        if (entering == allowed || ratio < best_ratio) {
          entering = c;
          best_ratio = ratio;
        }
      }
      if (entering == allowed) {
        // Rows still carrying tolerance-level infeasibility count as feasible.
        return worst >= -kFeasibilityTolerance;
      }
      count(iterations, cap);
      pivot(leaving, entering);
    }
  }

  double max_reduced(std::size_t allowed) const {
    double m = 0.0;
    for (std::size_t c = 0; c < allowed; ++c) m = std::max(m, reduced_[c]);
    return m;
  }

 private:
  void refresh_reduced() {
    for (std::size_t c = 0; c < cols_; ++c) {
      double z = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) z += cost_[basis_[r]] * at(r, c);
      reduced_[c] = cost_[c] - z;
    }
  }

  static void count(std::size_t& iterations, std::size_t cap) {
    if (++iterations > cap) {
      throw Error("IterationLimit", "simplex exceeded " + std::to_string(cap) + " iterations");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> original_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
  std::size_t since_reinvert_ = 0;
};

Error malformed(const std::string& why) { return Error("MalformedProblem", why); }

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.variables();
  if (n == 0) throw malformed("linear program has no variables");
  if (lp.rows.size() != lp.rhs.size()) throw malformed("row and bound counts differ");
  if (!lp.lower.empty() && lp.lower.size() != n) throw malformed("lower bounds have the wrong length");
  if (!lp.upper.empty() && lp.upper.size() != n) throw malformed("upper bounds have the wrong length");
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw malformed("objective coefficients must be finite");
  }
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (lp.rows[r].size() != n) throw malformed("row " + std::to_string(r) + " has the wrong length");
    for (double a : lp.rows[r]) {
      if (!std::isfinite(a)) throw malformed("constraint coefficients must be finite");
    }
    if (std::isnan(lp.rhs[r]) || lp.rhs[r] == -kInfinity) throw malformed("constraint bounds must not be NaN or -inf");
  }

  // Substitute bounded and free variables by nonnegative columns.
  std::vector<VariableMap> vars(n);
  std::size_t columns = 0;
  std::vector<std::pair<std::size_t, double>> boxes;  // column <= width
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
    const double hi = lp.upper.empty() ? kInfinity : lp.upper[j];
    if (std::isnan(lo) || std::isnan(hi) || lo == kInfinity || hi == -kInfinity) {
      throw malformed("variable " + std::to_string(j) + " has invalid bounds");
    }
    if (lo > hi) throw Error("Infeasible", "variable " + std::to_string(j) + " has empty bounds");
    VariableMap& v = vars[j];
    v.column = columns;
    if (std::isfinite(lo)) {
      v.offset = lo;
      ++columns;
      if (std::isfinite(hi)) boxes.emplace_back(v.column, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      ++columns;
    } else {
      v.split = true;
      columns += 2;
    }
  }

  // Standard form rows: A' y <= b'.
  std::vector<std::vector<double>> rows;
  std::vector<double> bounds;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    if (lp.rhs[r] == kInfinity) continue;
    std::vector<double> row(columns, 0.0);
    double b = lp.rhs[r];
    for (std::size_t j = 0; j < n; ++j) {
      const double a = lp.rows[r][j];
      if (a == 0.0) continue;
      const VariableMap& v = vars[j];
      b -= a * v.offset;
      row[v.column] += v.sign * a;
      if (v.split) row[v.column + 1] -= a;
    }
    rows.push_back(std::move(row));
    bounds.push_back(b);
  }
  for (const auto& [col, width] : boxes) {
    std::vector<double> row(columns, 0.0);
    row[col] = 1.0;
    rows.push_back(std::move(row));
    bounds.push_back(width);
  }

  // Each bound is relaxed by a tiny row-specific amount so that vertices
  // are rarely degenerate; the exact bounds are restored at the end and any
  // infeasibility that exposes is repaired by dual simplex pivots.
  const std::size_t m = rows.size();
  std::vector<double> perturbed(m);
  for (std::size_t r = 0; r < m; ++r) {
    perturbed[r] = bounds[r] + kPerturbation * (1.0 + std::abs(bounds[r])) * (1.0 + row_jitter(r));
  }
  std::size_t artificials = 0;
  for (double b : perturbed) artificials += b < 0.0 ? 1 : 0;
  const std::size_t slack0 = columns;
  const std::size_t art0 = columns + m;
  const std::size_t width = columns + m + artificials;
  std::vector<double> original(m * (width + 1), 0.0);
  std::vector<double> exact(m), relaxed(m);
  std::vector<std::size_t> basis(m);
  {
    std::size_t next_art = art0;
    for (std::size_t r = 0; r < m; ++r) {
      double* row = original.data() + r * (width + 1);
      const double sign = perturbed[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < columns; ++c) row[c] = sign * rows[r][c];
      row[slack0 + r] = sign;
      exact[r] = sign * bounds[r];
      relaxed[r] = sign * perturbed[r];
      row[width] = relaxed[r];
      if (sign < 0.0) {
        row[next_art] = 1.0;
        basis[r] = next_art++;
      } else {
        basis[r] = slack0 + r;
      }
    }
  }
  Tableau t(std::move(original), std::move(basis), width);

  const std::size_t total = columns + m;
  const std::size_t cap = 10 * total * total;
  LpSolution solution;

  if (artificials > 0) {
    std::vector<double> phase1(t.cols(), 0.0);
    for (std::size_t c = art0; c < t.cols(); ++c) phase1[c] = -1.0;
    t.set_cost(std::move(phase1));
    t.optimize(t.cols(), solution.iterations, cap);
    t.reinvert();
    if (t.objective_value() < -kFeasibilityTolerance) {
      throw Error("Infeasible", "linear program has no feasible point");
    }
    // Drive artificial variables out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art0) continue;
      std::size_t best = art0;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(t.at(r, c)) > 1e-9 && (best == art0 || std::abs(t.at(r, c)) > std::abs(t.at(r, best)))) best = c;
      }
      if (best < art0) t.pivot(r, best);
    }
  }

  std::vector<double> phase2(t.cols(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const VariableMap& v = vars[j];
    phase2[v.column] = v.sign * lp.objective[j];
    if (v.split) phase2[v.column + 1] = -lp.objective[j];
  }
  t.set_cost(std::move(phase2));
  if (!t.optimize(art0, solution.iterations, cap)) {
    throw Error("Unbounded", "linear program is unbounded");
  }
  t.set_original_rhs(exact);
  for (std::size_t round = 0;; ++round) {
    if (!t.restore_feasibility(art0, solution.iterations, cap)) {
      throw Error("Infeasible", "linear program has no feasible point");
    }
    if (!t.optimize(art0, solution.iterations, cap)) {
      throw Error("Unbounded", "linear program is unbounded");
    }
    t.reinvert();
    bool feasible = true;
    for (std::size_t r = 0; r < m; ++r) feasible = feasible && t.rhs(r) >= -kPivotTolerance;
    if ((feasible && t.max_reduced(art0) <= kCostTolerance) || round + 1 == kCleanupRounds) break;
  }

  std::vector<double> y(t.cols(), 0.0);
  for (std::size_t r = 0; r < m; ++r) y[t.basis()[r]] = std::max(t.rhs(r), 0.0);
  solution.witness.resize(n);
  solution.optimum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const VariableMap& v = vars[j];
    double x = v.offset + v.sign * y[v.column];
    if (v.split) x -= y[v.column + 1];
    solution.witness[j] = x;
    solution.optimum += lp.objective[j] * x;
  }
  return solution;
}

}  // namespace merge_metrics
