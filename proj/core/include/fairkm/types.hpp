#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fairkm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n points in d dimensions with a dense group id in [0, m) per point.
///
/// Every group id in [0, m) must occur at least once. Immutable after
/// construction.
class Dataset {
 public:
  /// m is inferred as max(group_of) + 1 unless `num_groups` is given.
  Dataset(RowMatrix points, std::vector<int> group_of, int num_groups = -1);
  Dataset(RowMatrix points, std::vector<int> group_of, std::vector<std::string> group_labels,
          std::vector<std::string> feature_names = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t m() const noexcept { return group_sizes_.size(); }

  const RowMatrix& points() const noexcept { return points_; }
  auto point(std::size_t p) const { return points_.row(static_cast<Eigen::Index>(p)); }

  std::span<const int> group_of() const noexcept { return group_of_; }
  int group_of(std::size_t p) const { return group_of_[p]; }
  std::span<const std::size_t> group_sizes() const noexcept { return group_sizes_; }
  const std::vector<std::string>& group_labels() const noexcept { return group_labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// Same groups and labels, new coordinates (row count must match).
  Dataset with_points(RowMatrix points, std::vector<std::string> feature_names = {}) const;

 private:
  void validate_and_count(int num_groups);

  RowMatrix points_;
  std::vector<int> group_of_;
  std::vector<std::size_t> group_sizes_;
  std::vector<std::string> group_labels_;
  std::vector<std::string> feature_names_;
};

/// Cluster index per point. Empty clusters are allowed as a transient state.
struct Assignment {
  std::vector<int> cluster_of;
  int k = 0;

  Assignment() = default;
  Assignment(std::vector<int> cluster_of, int k);

  std::size_t size() const noexcept { return cluster_of.size(); }
  std::vector<std::size_t> cluster_sizes() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// k centers in d dimensions, all coordinates finite.
class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(RowMatrix centers);

  std::size_t k() const noexcept { return static_cast<std::size_t>(centers_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(centers_.cols()); }
  const RowMatrix& matrix() const noexcept { return centers_; }
  auto center(std::size_t i) const { return centers_.row(static_cast<Eigen::Index>(i)); }

  friend bool operator==(const CenterSet& a, const CenterSet& b) {
    return a.centers_.rows() == b.centers_.rows() && a.centers_.cols() == b.centers_.cols() &&
           a.centers_ == b.centers_;
  }

 private:
  RowMatrix centers_;
};

/// Per cluster x group sufficient statistics for the fixed-partition
/// fair-center problem:
///
///   frac(i, j)   = |U_i ∩ A_j| / |A_j|
///   mean(i, j)   = mean of U_i ∩ A_j        (meaningless when frac(i, j) == 0)
///   base_cost[j] = sum_i sum_{p in U_i ∩ A_j} ||p - mean(i, j)||^2 / |A_j|
///
/// A cell is "present" iff frac(i, j) > 0. Absent cells contribute nothing to
/// any group cost.
struct GroupClusterStats {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  Eigen::MatrixXd frac;  // k x m
  RowMatrix means;       // (k * m) x d, row i * m + j
  Vector base_cost;      // m

  /// Builds stats from tabulated values (e.g. a worked example) and validates them.
  /// `means[i][j]` is the d-vector for cluster i, group j.
  static GroupClusterStats from_table(const Eigen::MatrixXd& frac,
                                      const std::vector<std::vector<Vector>>& means,
                                      const Vector& base_cost);

  bool present(std::size_t i, std::size_t j) const { return frac(i, j) > 0.0; }
  auto mean(std::size_t i, std::size_t j) const {
    return means.row(static_cast<Eigen::Index>(i * m + j));
  }

  /// Distance between the two group means of cluster i (m == 2); 0 when either
  /// group is absent from the cluster.
  double segment_length(std::size_t i) const;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

}  // namespace fairkm
