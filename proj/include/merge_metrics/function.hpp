#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "merge_metrics/metric_space.hpp"

namespace merge_metrics {

/// Nondecreasing envelope h -> omega(h) with omega(0) = 0, given by knots and
/// interpolated linearly (the segment before the first knot starts at the
/// origin). Past the last knot the envelope is either held constant or
/// continued with the slope of the last segment.
class Modulus {
 public:
  enum class Tail { Constant, Linear };

  Modulus(std::vector<std::pair<double, double>> knots, Tail tail);

  /// omega(h) = slope * h.
  static Modulus linear(double slope);
  /// omega == 0: only constant functions are admitted.
  static Modulus zero();

  double operator()(double h) const;

  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
  Tail tail() const noexcept { return tail_; }

 private:
  std::vector<std::pair<double, double>> knots_;
  Tail tail_;
};

/// Real function on the points of a space. Tabulated functions hold one
/// value per point of their space. Analytic functions are rules on
/// coordinates with an optional certified modulus of continuity; they become
/// tabulated through `tabulate`.
class FunctionOnSpace {
 public:
  using Rule = std::function<double(std::span<const double>)>;

  static FunctionOnSpace tabulated(SpacePtr space, std::vector<double> values);
  static FunctionOnSpace analytic(std::string name, Rule rule, std::optional<Modulus> certificate);

  bool is_tabulated() const noexcept { return !rule_; }
  const std::string& name() const noexcept { return name_; }
  const std::optional<Modulus>& certificate() const noexcept { return certificate_; }

  /// Tabulated accessors; throw NotTabulated for analytic functions.
  const SpacePtr& space() const;
  const std::vector<double>& values() const;
  double operator[](std::size_t i) const { return values()[i]; }
  double sup_norm() const;
  /// max |f(x) - f(y)| / dist(x, y) over distinct points; 0 on spaces with
  /// fewer than two points.
  double lip_norm() const;

  /// Value of an analytic rule at a point of `space`; throws UndefinedAt when
  /// the point has no coordinates.
  double evaluate(const MetricSpace& space, std::size_t i) const;

  /// Restriction to the points of `space`. For analytic functions with a
  /// certificate, the empirical modulus is checked against it at every
  /// realized distance (relative slack 1e-12 for coordinate rounding) and a
  /// violation throws InvalidModulus.
  FunctionOnSpace tabulate(const SpacePtr& space) const;

  /// Rebinds a tabulated function's values to another space of equal size.
  FunctionOnSpace with_space(SpacePtr space) const;

 private:
  std::string name_;
  SpacePtr space_;
  std::vector<double> values_;
  Rule rule_;
  std::optional<Modulus> certificate_;
};

/// Built-in analytic rules on the first coordinate:
///   "sin_quarter_pi_sq"  x -> sin((pi/4) x^2), bounded but not uniformly
///                        continuous on the line; never certified.
///   "identity"           x -> x, certified by omega(h) = h.
///   "bl_custom"          x -> clamp(x, -1, 1) / 2, certified by omega(h) = h/2;
///                        ||f||_L + ||f||_inf = 1.
/// `certificate` overrides the default certificate when given.
FunctionOnSpace named_function(const std::string& name,
                               std::optional<Modulus> certificate = std::nullopt);

}  // namespace merge_metrics
