#pragma once

#include <cstddef>
#include <optional>

#include "fairkm/types.hpp"

namespace fairkm {

/// Raw k-means cost: sum over clusters i of sum_{p in U_i} ||p - c_i||^2,
/// restricted to points of `group` when given. Compensated summation.
double kmeans_cost(const CenterSet& centers, const Dataset& dataset, const Assignment& assignment,
                   std::optional<int> group = std::nullopt);

/// Average cost of group j through the sufficient statistics:
///   f_j(C) = base_cost[j] + sum_i frac(i, j) * ||c_i - mean(i, j)||^2.
/// Runs in O(k d), independent of n. Absent cells are skipped.
double group_cost(const CenterSet& centers, const GroupClusterStats& stats, std::size_t j);

/// All m group costs.
Vector group_costs(const CenterSet& centers, const GroupClusterStats& stats);

/// Phi(C) = max_j f_j(C). For m == 1 this is the mean k-means cost.
double fair_objective(const CenterSet& centers, const GroupClusterStats& stats);

/// Gradient of f_j with respect to every center coordinate (k x d):
/// d f_j / d c_i = 2 frac(i, j) (c_i - mean(i, j)).
RowMatrix group_cost_gradient(const CenterSet& centers, const GroupClusterStats& stats,
                              std::size_t j);

/// Exact counts, means (sum / count) and base costs from the points.
GroupClusterStats compute_group_stats(const Dataset& dataset, const Assignment& assignment);

/// Stats for the whole dataset treated as a single group (m == 1). Cluster
/// means come out of the same code path as compute_group_stats.
GroupClusterStats compute_pooled_stats(const Dataset& dataset, const Assignment& assignment);

}  // namespace fairkm
