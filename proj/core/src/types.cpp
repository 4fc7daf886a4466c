#include "fairkm/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairkm {

namespace {

std::vector<std::string> default_labels(std::size_t m) {
  std::vector<std::string> labels;
  labels.reserve(m);
  for (std::size_t j = 0; j < m; ++j) labels.push_back(std::to_string(j));
  return labels;
}

}  // namespace

Dataset::Dataset(RowMatrix points, std::vector<int> group_of, int num_groups)
    : points_(std::move(points)), group_of_(std::move(group_of)) {
  validate_and_count(num_groups);
  group_labels_ = default_labels(group_sizes_.size());
}

Dataset::Dataset(RowMatrix points, std::vector<int> group_of,
                 std::vector<std::string> group_labels, std::vector<std::string> feature_names)
    : points_(std::move(points)),
      group_of_(std::move(group_of)),
      group_labels_(std::move(group_labels)),
      feature_names_(std::move(feature_names)) {
  validate_and_count(static_cast<int>(group_labels_.size()));
  if (!feature_names_.empty() && feature_names_.size() != d()) {
    throw std::invalid_argument("Dataset: feature_names size does not match d");
  }
}

void Dataset::validate_and_count(int num_groups) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
  }
  if (group_of_.size() != n()) {
    throw std::invalid_argument("Dataset: group_of length does not match number of points");
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite coordinate");
  }
  const int max_group = *std::max_element(group_of_.begin(), group_of_.end());
  const int m = num_groups >= 0 ? num_groups : max_group + 1;
  if (m < 1) throw std::invalid_argument("Dataset: need m >= 1");
  group_sizes_.assign(static_cast<std::size_t>(m), 0);
  for (int g : group_of_) {
    if (g < 0 || g >= m) throw std::invalid_argument("Dataset: group id outside [0, m)");
    ++group_sizes_[static_cast<std::size_t>(g)];
  }
  for (std::size_t j = 0; j < group_sizes_.size(); ++j) {
    if (group_sizes_[j] == 0) {
      throw std::invalid_argument("Dataset: group " + std::to_string(j) + " has no points");
    }
  }
}

Dataset Dataset::with_points(RowMatrix points, std::vector<std::string> feature_names) const {
  if (static_cast<std::size_t>(points.rows()) != n()) {
    throw std::invalid_argument("Dataset::with_points: row count changed");
  }
  return Dataset(std::move(points), group_of_, group_labels_, std::move(feature_names));
}

Assignment::Assignment(std::vector<int> cluster_of_in, int k_in)
    : cluster_of(std::move(cluster_of_in)), k(k_in) {
  if (k < 1) throw std::invalid_argument("Assignment: k must be >= 1");
  for (int c : cluster_of) {
    if (c < 0 || c >= k) throw std::invalid_argument("Assignment: cluster index outside [0, k)");
  }
}

std::vector<std::size_t> Assignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int c : cluster_of) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

CenterSet::CenterSet(RowMatrix centers) : centers_(std::move(centers)) {
  if (centers_.rows() < 1 || centers_.cols() < 1) {
    throw std::invalid_argument("CenterSet: need k >= 1 and d >= 1");
  }
  if (!centers_.allFinite()) throw std::invalid_argument("CenterSet: non-finite coordinate");
}

GroupClusterStats GroupClusterStats::from_table(const Eigen::MatrixXd& frac,
                                                const std::vector<std::vector<Vector>>& means,
                                                const Vector& base_cost) {
  GroupClusterStats s;
  s.k = static_cast<std::size_t>(frac.rows());
  s.m = static_cast<std::size_t>(frac.cols());
  if (s.k == 0 || s.m == 0 || means.size() != s.k || means.front().empty()) {
    throw std::invalid_argument("GroupClusterStats::from_table: inconsistent shapes");
  }
  s.d = static_cast<std::size_t>(means.front().front().size());
  s.frac = frac;
  s.base_cost = base_cost;
  s.means = RowMatrix::Zero(static_cast<Eigen::Index>(s.k * s.m), static_cast<Eigen::Index>(s.d));
  for (std::size_t i = 0; i < s.k; ++i) {
    if (means[i].size() != s.m) {
      throw std::invalid_argument("GroupClusterStats::from_table: means row has wrong group count");
    }
    for (std::size_t j = 0; j < s.m; ++j) {
      if (static_cast<std::size_t>(means[i][j].size()) != s.d) {
        throw std::invalid_argument("GroupClusterStats::from_table: mean dimension mismatch");
      }
      s.means.row(static_cast<Eigen::Index>(i * s.m + j)) = means[i][j].transpose();
    }
  }
  s.validate();
  return s;
}

double GroupClusterStats::segment_length(std::size_t i) const {
  if (m != 2) throw std::invalid_argument("segment_length: requires m == 2");
  if (!present(i, 0) || !present(i, 1)) return 0.0;
  return (mean(i, 0) - mean(i, 1)).norm();
}

void GroupClusterStats::validate() const {
  if (k == 0 || m == 0 || d == 0) throw std::invalid_argument("GroupClusterStats: empty shape");
  if (static_cast<std::size_t>(frac.rows()) != k || static_cast<std::size_t>(frac.cols()) != m ||
      static_cast<std::size_t>(means.rows()) != k * m ||
      static_cast<std::size_t>(means.cols()) != d ||
      static_cast<std::size_t>(base_cost.size()) != m) {
    throw std::invalid_argument("GroupClusterStats: field shapes disagree with k, m, d");
  }
  for (std::size_t j = 0; j < m; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double a = frac(i, j);
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("GroupClusterStats: frac outside [0,1]");
      col += a;
    }
    if (std::abs(col - 1.0) > 1e-9) {
      throw std::invalid_argument("GroupClusterStats: frac column " + std::to_string(j) +
                                  " does not sum to 1");
    }
    if (!(base_cost[static_cast<Eigen::Index>(j)] >= 0.0)) {
      throw std::invalid_argument("GroupClusterStats: negative base cost");
    }
  }
  if (!means.allFinite()) throw std::invalid_argument("GroupClusterStats: non-finite mean");
}

}  // namespace fairkm
