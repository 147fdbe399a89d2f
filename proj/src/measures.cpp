#include "merge_metrics/measures.hpp"

#include <cmath>
#include <map>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw Error("InvalidArgument", "measure needs a space");
  if (weights_.size() != space_->size()) {
    throw Error("InvalidArgument", "measure has " + std::to_string(weights_.size()) +
                                       " weights for a space of " +
                                       std::to_string(space_->size()) + " points");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) throw NegativeWeight(i);
  }
  const double sum = compensated_sum(weights_);
  if (std::abs(sum - 1.0) > kNormalizationTolerance) throw NotNormalized(sum);
}

std::vector<std::size_t> DiscreteMeasure::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0.0) out.push_back(i);
  }
  return out;
}

double DiscreteMeasure::mass(const std::vector<std::size_t>& points) const {
  double m = 0.0;
  for (std::size_t i : points) m += weights_[i];
  return m;
}

DiscreteMeasure discrete_measure(SpacePtr space, std::vector<double> weights) {
  return DiscreteMeasure(std::move(space), std::move(weights));
}

DiscreteMeasure point_mass(SpacePtr space, std::size_t index) {
  if (!space || index >= space->size()) throw Error("InvalidArgument", "point mass index out of range");
  std::vector<double> w(space->size(), 0.0);
  w[index] = 1.0;
  return DiscreteMeasure(std::move(space), std::move(w));
}

DiscreteMeasure empirical(const Coordinates& samples, MetricKind kind) {
  if (samples.empty()) throw Error("EmptySample", "empirical measure of an empty sample");
  std::map<std::vector<double>, std::size_t> slot;
  Coordinates atoms;
  std::vector<std::size_t> counts;
  for (const auto& s : samples) {
    auto [it, inserted] = slot.try_emplace(s, atoms.size());
    if (inserted) {
      atoms.push_back(s);
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  const double m = static_cast<double>(samples.size());
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) weights[i] = static_cast<double>(counts[i]) / m;
  return DiscreteMeasure(make_space(MetricSpace::from_coordinates(std::move(atoms), kind)),
                         std::move(weights));
}

SignedMeasure::SignedMeasure(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_ || weights_.size() != space_->size()) {
    throw Error("InvalidArgument", "signed measure size does not match its space");
  }
  const double sum = compensated_sum(weights_);
  if (std::abs(sum) > kNormalizationTolerance) {
    throw Error("NotBalanced", "signed measure has total mass " + std::to_string(sum));
  }
}

void require_common_space(const SpacePtr& a, const SpacePtr& b) {
  if (a.get() == b.get()) return;
  if (!a || !b || !(*a == *b)) {
    throw Error("SpaceMismatch", "measures live on different spaces; merge them onto a union space first");
  }
}

SignedMeasure signed_diff(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  require_common_space(p.space(), q.space());
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = p[i] - q[i];
  return SignedMeasure(p.space(), std::move(w));
}

double total_variation(const SignedMeasure& psi) {
  double tv = 0.0;
  for (double w : psi.weights()) tv += std::abs(w);
  return tv;
}

namespace {

template <class Weights>
double integrate_weights(const FunctionOnSpace& f, const SpacePtr& space, const Weights& w) {
  double acc = 0.0;
  if (f.is_tabulated()) {
    require_common_space(f.space(), space);
    const auto& v = f.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) acc += v[i] * w[i];
    }
    return acc;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) acc += f.evaluate(*space, i) * w[i];
  }
  return acc;
}

}  // namespace

double integrate(const FunctionOnSpace& f, const SignedMeasure& psi) {
  return integrate_weights(f, psi.space(), psi.weights());
}

double integrate(const FunctionOnSpace& f, const DiscreteMeasure& p) {
  return integrate_weights(f, p.space(), p.weights());
}

std::pair<DiscreteMeasure, DiscreteMeasure> merge_onto_union(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q) {
  const MetricSpace& sp = *p.space();
  const MetricSpace& sq = *q.space();
  if (p.space().get() == q.space().get() || sp == sq) return {p, DiscreteMeasure(p.space(), q.weights())};
  if (sp.kind() == MetricKind::Matrix || sq.kind() == MetricKind::Matrix || sp.kind() != sq.kind() ||
      !sp.has_coordinates() || !sq.has_coordinates() ||
      (sp.size() > 0 && sq.size() > 0 && sp.dimension() != sq.dimension())) {
    throw Error("SpaceMismatch", "spaces cannot be merged: union needs coordinates under one metric rule");
  }
  Coordinates points = sp.coordinates();
  std::map<std::vector<double>, std::size_t> slot;
  for (std::size_t i = 0; i < points.size(); ++i) slot.emplace(points[i], i);
  std::vector<std::size_t> q_index(sq.size());
  for (std::size_t j = 0; j < sq.size(); ++j) {
    auto [it, inserted] = slot.try_emplace(sq.coordinates()[j], points.size());
    if (inserted) points.push_back(sq.coordinates()[j]);
    q_index[j] = it->second;
  }
  const std::size_t n = points.size();
  SpacePtr space = make_space(MetricSpace::from_coordinates(std::move(points), sp.kind()));
  std::vector<double> wp(n, 0.0);
  std::vector<double> wq(n, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) wp[i] = p[i];
  for (std::size_t j = 0; j < q.size(); ++j) wq[q_index[j]] += q[j];
  return {DiscreteMeasure(space, std::move(wp)), DiscreteMeasure(space, std::move(wq))};
}

}  // namespace merge_metrics
