#pragma once

#include <span>

#include <Eigen/Dense>

namespace fairkm {

/// Euclidean projection of `v` onto the probability simplex {x >= 0, sum x = 1},
/// in place. Sort-and-threshold, O(n log n).
void project_to_simplex(std::span<double> v);

struct MinNormPoint {
  Eigen::VectorXd weights;  // on the simplex
  double norm = 0.0;        // ||generators * weights||
};

/// Smallest-norm point of the convex hull of the columns of `generators`.
///
/// Exact (support enumeration over KKT systems) for up to 12 columns; beyond
/// that an accelerated projected-gradient solve is used.
MinNormPoint min_norm_in_hull(const Eigen::MatrixXd& generators);

}  // namespace fairkm
