#include "fairkm/cost.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairkm/summation.hpp"

namespace fairkm {

namespace {

void check_shapes(const CenterSet& centers, const Dataset& dataset, const Assignment& assignment) {
  if (assignment.size() != dataset.n()) {
    throw std::invalid_argument("assignment length " + std::to_string(assignment.size()) +
                                " != n " + std::to_string(dataset.n()));
  }
  if (static_cast<std::size_t>(assignment.k) != centers.k()) {
    throw std::invalid_argument("assignment.k " + std::to_string(assignment.k) +
                                " != number of centers " + std::to_string(centers.k()));
  }
  if (centers.d() != dataset.d()) {
    throw std::invalid_argument("center dimension " + std::to_string(centers.d()) +
                                " != data dimension " + std::to_string(dataset.d()));
  }
}

void check_stats(const CenterSet& centers, const GroupClusterStats& stats) {
  if (centers.k() != stats.k || centers.d() != stats.d) {
    throw std::invalid_argument("centers shape (" + std::to_string(centers.k()) + "x" +
                                std::to_string(centers.d()) + ") does not match stats (" +
                                std::to_string(stats.k) + "x" + std::to_string(stats.d) + ")");
  }
}

// Shared by the per-group and pooled variants; `group_key[p]` selects the
// column, `num_keys` its count.
GroupClusterStats stats_for_keys(const Dataset& dataset, const Assignment& assignment,
                                 std::span<const int> group_key, std::size_t num_keys) {
  if (assignment.size() != dataset.n()) {
    throw std::invalid_argument("assignment length does not match dataset");
  }
  const std::size_t k = static_cast<std::size_t>(assignment.k);
  const std::size_t m = num_keys;
  const std::size_t d = dataset.d();
  const std::size_t n = dataset.n();

  std::vector<std::size_t> counts(k * m, 0);
  std::vector<std::size_t> group_total(m, 0);
  std::vector<CompensatedSum> sums(k * m * d);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t cell = static_cast<std::size_t>(assignment.cluster_of[p]) * m +
                             static_cast<std::size_t>(group_key[p]);
    ++counts[cell];
    ++group_total[static_cast<std::size_t>(group_key[p])];
    const auto row = dataset.point(p);
    for (std::size_t s = 0; s < d; ++s) sums[cell * d + s].add(row[static_cast<Eigen::Index>(s)]);
  }

  GroupClusterStats stats;
  stats.k = k;
  stats.m = m;
  stats.d = d;
  stats.frac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  stats.means = RowMatrix::Zero(static_cast<Eigen::Index>(k * m), static_cast<Eigen::Index>(d));
  stats.base_cost = Vector::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t cell = i * m + j;
      if (counts[cell] == 0) continue;
      stats.frac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(counts[cell]) / static_cast<double>(group_total[j]);
      for (std::size_t s = 0; s < d; ++s) {
        stats.means(static_cast<Eigen::Index>(cell), static_cast<Eigen::Index>(s)) =
            sums[cell * d + s].value() / static_cast<double>(counts[cell]);
      }
    }
  }

  // Second pass: squared deviations from the cell means.
  std::vector<CompensatedSum> deviation(m);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t j = static_cast<std::size_t>(group_key[p]);
    const std::size_t cell = static_cast<std::size_t>(assignment.cluster_of[p]) * m + j;
    deviation[j].add(
        (dataset.point(p) - stats.means.row(static_cast<Eigen::Index>(cell))).squaredNorm());
  }
  for (std::size_t j = 0; j < m; ++j) {
    stats.base_cost[static_cast<Eigen::Index>(j)] =
        group_total[j] > 0 ? deviation[j].value() / static_cast<double>(group_total[j]) : 0.0;
  }
  return stats;
}

}  // namespace

double kmeans_cost(const CenterSet& centers, const Dataset& dataset, const Assignment& assignment,
                   std::optional<int> group) {
  check_shapes(centers, dataset, assignment);
  if (group && (*group < 0 || static_cast<std::size_t>(*group) >= dataset.m())) {
    throw std::invalid_argument("kmeans_cost: group id outside [0, m)");
  }
  CompensatedSum total;
  for (std::size_t p = 0; p < dataset.n(); ++p) {
    if (group && dataset.group_of(p) != *group) continue;
    total.add((dataset.point(p) - centers.center(static_cast<std::size_t>(assignment.cluster_of[p])))
                  .squaredNorm());
  }
  return total.value();
}

double group_cost(const CenterSet& centers, const GroupClusterStats& stats, std::size_t j) {
  check_stats(centers, stats);
  if (j >= stats.m) {
    throw std::invalid_argument("group_cost: group " + std::to_string(j) + " outside [0, " +
                                std::to_string(stats.m) + ")");
  }
  CompensatedSum total;
  total.add(stats.base_cost[static_cast<Eigen::Index>(j)]);
  for (std::size_t i = 0; i < stats.k; ++i) {
    if (!stats.present(i, j)) continue;
    total.add(stats.frac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
              (centers.center(i) - stats.mean(i, j)).squaredNorm());
  }
  return total.value();
}

Vector group_costs(const CenterSet& centers, const GroupClusterStats& stats) {
  Vector costs(static_cast<Eigen::Index>(stats.m));
  for (std::size_t j = 0; j < stats.m; ++j) {
    costs[static_cast<Eigen::Index>(j)] = group_cost(centers, stats, j);
  }
  return costs;
}

double fair_objective(const CenterSet& centers, const GroupClusterStats& stats) {
  return group_costs(centers, stats).maxCoeff();
}

RowMatrix group_cost_gradient(const CenterSet& centers, const GroupClusterStats& stats,
                              std::size_t j) {
  check_stats(centers, stats);
  if (j >= stats.m) throw std::invalid_argument("group_cost_gradient: group outside [0, m)");
  RowMatrix grad = RowMatrix::Zero(static_cast<Eigen::Index>(stats.k),
                                   static_cast<Eigen::Index>(stats.d));
  for (std::size_t i = 0; i < stats.k; ++i) {
    if (!stats.present(i, j)) continue;
    grad.row(static_cast<Eigen::Index>(i)) =
        2.0 * stats.frac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
        (centers.center(i) - stats.mean(i, j));
  }
  return grad;
}

GroupClusterStats compute_group_stats(const Dataset& dataset, const Assignment& assignment) {
  return stats_for_keys(dataset, assignment, dataset.group_of(), dataset.m());
}

GroupClusterStats compute_pooled_stats(const Dataset& dataset, const Assignment& assignment) {
  const std::vector<int> pooled(dataset.n(), 0);
  return stats_for_keys(dataset, assignment, pooled, 1);
}

}  // namespace fairkm
