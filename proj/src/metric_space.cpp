#include "merge_metrics/metric_space.hpp"

#include <algorithm>
#include <cmath>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean:
      return "euclidean";
    case MetricKind::L1:
      return "l1";
    case MetricKind::Discrete:
      return "discrete";
    case MetricKind::Matrix:
      return "matrix";
  }
  return "matrix";
}

MetricKind metric_kind_from_string(const std::string& name) {
  if (name == "euclidean") return MetricKind::Euclidean;
  if (name == "l1") return MetricKind::L1;
  if (name == "discrete") return MetricKind::Discrete;
  if (name == "matrix") return MetricKind::Matrix;
  throw Error("InvalidArgument", "unknown metric '" + name + "'");
}

MetricSpace MetricSpace::from_coordinates(Coordinates points, MetricKind kind) {
  if (kind == MetricKind::Matrix) {
    throw Error("InvalidArgument", "the matrix metric needs an explicit distance matrix");
  }
  MetricSpace space;
  space.size_ = points.size();
  space.kind_ = kind;
  if (!points.empty()) {
    const std::size_t dim = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != dim) {
        throw Error("InvalidArgument", "point " + std::to_string(i) + " has dimension " +
                                           std::to_string(points[i].size()) + ", expected " +
                                           std::to_string(dim));
      }
      for (double c : points[i]) {
        if (!std::isfinite(c)) throw AxiomViolation(i, i, i, "finiteness");
      }
    }
  }
  space.points_ = std::move(points);
  space.validate();
  return space;
}

MetricSpace MetricSpace::from_matrix(const std::vector<std::vector<double>>& matrix,
                                     std::optional<Coordinates> points) {
  MetricSpace space;
  const std::size_t n = matrix.size();
  space.size_ = n;
  space.kind_ = MetricKind::Matrix;
  space.matrix_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      throw Error("InvalidArgument", "distance matrix is not square (row " + std::to_string(i) + ")");
    }
    space.matrix_.insert(space.matrix_.end(), matrix[i].begin(), matrix[i].end());
  }
  if (points) {
    if (points->size() != n) {
      throw Error("InvalidArgument", "coordinate count does not match the matrix size");
    }
    space.points_ = std::move(points);
  }
  space.validate();
  return space;
}

MetricSpace MetricSpace::discrete(std::size_t n) {
  MetricSpace space;
  space.size_ = n;
  space.kind_ = MetricKind::Discrete;
  return space;
}

const Coordinates& MetricSpace::coordinates() const {
  if (!points_) throw Error("InvalidArgument", "space has no coordinates");
  return *points_;
}

std::size_t MetricSpace::dimension() const noexcept {
  if (!points_ || points_->empty()) return 0;
  return points_->front().size();
}

double MetricSpace::dist(std::size_t i, std::size_t j) const {
  if (kind_ == MetricKind::Matrix) return matrix_[i * size_ + j];
  if (i == j) return 0.0;
  if (kind_ == MetricKind::Discrete) {
    if (!points_) return 1.0;
    return (*points_)[i] == (*points_)[j] ? 0.0 : 1.0;
  }
  const auto& a = (*points_)[i];
  const auto& b = (*points_)[j];
  if (a.size() == 1) return std::abs(a[0] - b[0]);
  double acc = 0.0;
  if (kind_ == MetricKind::L1) {
    for (std::size_t c = 0; c < a.size(); ++c) acc += std::abs(a[c] - b[c]);
    return acc;
  }
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<std::vector<double>> MetricSpace::distance_matrix() const {
  std::vector<std::vector<double>> out(size_, std::vector<double>(size_, 0.0));
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) out[i][j] = dist(i, j);
  }
  return out;
}

double MetricSpace::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = i + 1; j < size_; ++j) best = std::max(best, dist(i, j));
  }
  return best;
}

std::vector<double> MetricSpace::realized_distances() const {
  std::vector<double> out;
  out.reserve(size_ * (size_ > 0 ? size_ - 1 : 0) / 2);
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = i + 1; j < size_; ++j) out.push_back(dist(i, j));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool MetricSpace::is_real_line() const noexcept {
  return (kind_ == MetricKind::Euclidean || kind_ == MetricKind::L1) && dimension() == 1;
}

bool operator==(const MetricSpace& a, const MetricSpace& b) {
  return a.size_ == b.size_ && a.kind_ == b.kind_ && a.points_ == b.points_ &&
         a.matrix_ == b.matrix_;
}

void MetricSpace::validate() const {
  const std::size_t n = size_;
  const bool exact = kind_ == MetricKind::Matrix;
  if (exact) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = dist(i, j);
        if (!std::isfinite(d)) throw AxiomViolation(i, j, j, "finiteness");
        if (i == j && d != 0.0) throw AxiomViolation(i, i, i, "identity");
        if (d < 0.0) throw AxiomViolation(i, j, j, "nonnegativity");
        if (d != dist(j, i)) throw NonSymmetric(i, j);
        if (i != j && d == 0.0) throw AxiomViolation(i, j, j, "identity");
      }
    }
  } else if (points_) {
    // Distinct points are at positive distance iff their coordinates differ.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const auto& pts = *points_;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
    for (std::size_t r = 1; r < n; ++r) {
      if (pts[order[r - 1]] == pts[order[r]]) {
        throw AxiomViolation(std::min(order[r - 1], order[r]), std::max(order[r - 1], order[r]),
                             std::max(order[r - 1], order[r]), "identity");
      }
    }
  }
  if (!exact && (kind_ == MetricKind::Discrete || n > kCoordinateValidationLimit)) return;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = dist(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        const double direct = dist(i, k);
        const double detour = dij + dist(j, k);
        const bool ok = direct <= detour * (1.0 + (exact ? kMatrixSlack : kCoordinateSlack));
        if (!ok) throw AxiomViolation(i, j, k, "triangle");
      }
    }
  }
}

SpacePtr make_space(MetricSpace space) {
  return std::make_shared<const MetricSpace>(std::move(space));
}

PointSet::PointSet(SpacePtr space, std::vector<std::size_t> members)
    : space_(std::move(space)), members_(std::move(members)) {
  if (!space_) throw Error("InvalidArgument", "point set needs a space");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= space_->size()) {
    throw Error("InvalidArgument", "point index " + std::to_string(members_.back()) +
                                       " outside the space");
  }
}

bool PointSet::contains(std::size_t i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

PointSet PointSet::all(SpacePtr space) {
  std::vector<std::size_t> members(space->size());
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
  return PointSet(std::move(space), std::move(members));
}

double dist_to_set(std::size_t x, const PointSet& set) {
  if (set.empty()) throw Error("EmptySet", "distance to an empty set");
  const MetricSpace& space = *set.space();
  double best = space.dist(x, set.members().front());
  for (std::size_t k : set.members()) best = std::min(best, space.dist(x, k));
  return best;
}

PointSet eps_neighborhood(const PointSet& set, double eps) {
  if (set.empty()) throw Error("EmptySet", "neighborhood of an empty set");
  if (!(eps >= 0.0)) throw Error("InvalidArgument", "neighborhood radius must be nonnegative");
  std::vector<std::size_t> members;
  for (std::size_t x = 0; x < set.space()->size(); ++x) {
    if (dist_to_set(x, set) <= eps) members.push_back(x);
  }
  return PointSet(set.space(), std::move(members));
}

}  // namespace merge_metrics
