#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "merge_metrics/function.hpp"
#include "merge_metrics/metric_space.hpp"

namespace merge_metrics {

/// Absolute tolerance on the total mass of a probability measure.
inline constexpr double kNormalizationTolerance = 1e-12;

/// Probability measure carried by the points of a finite space. Weights are
/// indexed by the full point list; zeros are allowed.
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpacePtr space, std::vector<double> weights);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::size_t size() const noexcept { return weights_.size(); }

  /// Indices with positive weight, ascending.
  std::vector<std::size_t> support() const;

  /// Mass of a set of point indices.
  double mass(const std::vector<std::size_t>& points) const;

 private:
  SpacePtr space_;
  std::vector<double> weights_;
};

/// Validating constructor: NegativeWeight(i) / NotNormalized(sum).
DiscreteMeasure discrete_measure(SpacePtr space, std::vector<double> weights);

DiscreteMeasure point_mass(SpacePtr space, std::size_t index);

/// Empirical measure of a sample. Identical coordinate rows are merged into
/// one atom (exact equality); atoms keep first-occurrence order and carry
/// weight count/m.
DiscreteMeasure empirical(const Coordinates& samples, MetricKind kind = MetricKind::Euclidean);

/// Signed measure with zero total mass.
class SignedMeasure {
 public:
  SignedMeasure(SpacePtr space, std::vector<double> weights);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::size_t size() const noexcept { return weights_.size(); }

 private:
  SpacePtr space_;
  std::vector<double> weights_;
};

/// Throws SpaceMismatch unless both measures live on the same space
/// (identical object or equal content).
void require_common_space(const SpacePtr& a, const SpacePtr& b);

SignedMeasure signed_diff(const DiscreteMeasure& p, const DiscreteMeasure& q);
double total_variation(const SignedMeasure& psi);

/// Sum of f(x_i) psi_i over points with nonzero weight.
double integrate(const FunctionOnSpace& f, const SignedMeasure& psi);
double integrate(const FunctionOnSpace& f, const DiscreteMeasure& p);

/// Re-expresses two measures on coordinate spaces with the same metric rule
/// over the union of their points (exact coordinate equality). The union
/// keeps the points of `p`'s space first, then new points of `q`'s space.
std::pair<DiscreteMeasure, DiscreteMeasure> merge_onto_union(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q);

/// Sum with Neumaier compensation.
double compensated_sum(const std::vector<double>& values);

}  // namespace merge_metrics
