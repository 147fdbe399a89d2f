#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace merge_metrics {

enum class MetricKind { Euclidean, L1, Discrete, Matrix };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

using Coordinates = std::vector<std::vector<double>>;

/// A finite metric space. Named metrics (euclidean, l1, discrete) compute
/// distances from coordinates on demand; explicit-matrix spaces store the
/// full matrix. Either kind may carry coordinates, which analytic functions
/// are evaluated on.
///
/// Construction validates the axioms: zero diagonal, symmetry, positive
/// off-diagonal entries, finiteness and the triangle inequality. Explicit
/// matrices get a relative slack of a few rounding units (kMatrixSlack), so
/// a matrix exported from a coordinate space reads back unchanged;
/// coordinate spaces up to kCoordinateValidationLimit points are checked
/// with a relative slack of 1e-12, larger ones are metrics by construction.
class MetricSpace {
 public:
  static constexpr std::size_t kCoordinateValidationLimit = 256;
  static constexpr double kCoordinateSlack = 1e-12;
  static constexpr double kMatrixSlack = 16 * std::numeric_limits<double>::epsilon();

  static MetricSpace from_coordinates(Coordinates points, MetricKind kind);
  static MetricSpace from_matrix(const std::vector<std::vector<double>>& matrix,
                                 std::optional<Coordinates> points = std::nullopt);
  /// Discrete metric on n opaque points.
  static MetricSpace discrete(std::size_t n);

  std::size_t size() const noexcept { return size_; }
  MetricKind kind() const noexcept { return kind_; }
  bool has_coordinates() const noexcept { return points_.has_value(); }
  const Coordinates& coordinates() const;
  /// Dimension of the attached coordinates, 0 when there are none.
  std::size_t dimension() const noexcept;

  double dist(std::size_t i, std::size_t j) const;
  std::vector<std::vector<double>> distance_matrix() const;
  double diameter() const;

  /// Sorted distinct positive pairwise distances.
  std::vector<double> realized_distances() const;

  /// True for spaces whose geometry is the real line (1-D coordinates with
  /// the euclidean or l1 rule).
  bool is_real_line() const noexcept;

  friend bool operator==(const MetricSpace& a, const MetricSpace& b);

 private:
  MetricSpace() = default;
  void validate() const;

  std::size_t size_ = 0;
  MetricKind kind_ = MetricKind::Matrix;
  std::optional<Coordinates> points_;
  std::vector<double> matrix_;  // row-major, Matrix kind only
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

SpacePtr make_space(MetricSpace space);

/// Subset of the points of a space. Members are kept sorted and unique; on
/// finite spaces every subset is closed.
class PointSet {
 public:
  PointSet(SpacePtr space, std::vector<std::size_t> members);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(std::size_t i) const;

  /// Whole space as a point set.
  static PointSet all(SpacePtr space);

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.members_ == b.members_;
  }

 private:
  SpacePtr space_;
  std::vector<std::size_t> members_;
};

/// min over k in K of dist(x, k). Throws EmptySet for empty K.
double dist_to_set(std::size_t x, const PointSet& set);

/// Closed neighborhood {x : dist_to_set(x, A) <= eps}.
PointSet eps_neighborhood(const PointSet& set, double eps);

}  // namespace merge_metrics
