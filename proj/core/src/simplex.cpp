#include "fairkm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fairkm {

void project_to_simplex(std::span<double> v) {
  if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    cumulative += sorted[r];
    const double candidate = (cumulative - 1.0) / static_cast<double>(r + 1);
    if (sorted[r] - candidate > 0.0) threshold = candidate;
  }
  for (double& x : v) x = std::max(x - threshold, 0.0);
}

namespace {

constexpr std::size_t kMaxEnumeratedGenerators = 12;

MinNormPoint enumerate_supports(const Eigen::MatrixXd& generators) {
  const auto count = generators.cols();
  const Eigen::MatrixXd gram = generators.transpose() * generators;
  MinNormPoint best;
  best.norm = std::numeric_limits<double>::infinity();

  const unsigned long subsets = 1UL << count;
  for (unsigned long mask = 1; mask < subsets; ++mask) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < count; ++j) {
      if (mask & (1UL << j)) support.push_back(j);
    }
    const auto s = static_cast<Eigen::Index>(support.size());
    // [G_SS 1; 1^T 0] [w; nu] = [0; 1]
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = gram(support[a], support[b]);
      kkt(a, s) = 1.0;
      kkt(s, a) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs[s] = 1.0;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite()) continue;
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(count);
    bool feasible = true;
    for (Eigen::Index a = 0; a < s; ++a) {
      if (sol[a] < -1e-12) {
        feasible = false;
        break;
      }
      weights[support[a]] = std::max(sol[a], 0.0);
    }
    if (!feasible) continue;
    const double total = weights.sum();
    if (!(total > 0.0)) continue;
    weights /= total;
    const double norm = (generators * weights).norm();
    if (norm < best.norm) {
      best.norm = norm;
      best.weights = std::move(weights);
    }
  }
  return best;
}

MinNormPoint projected_gradient(const Eigen::MatrixXd& generators) {
  const auto count = generators.cols();
  const Eigen::MatrixXd gram = generators.transpose() * generators;
  const double lipschitz =
      std::max(2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff(),
               1e-300);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
  Eigen::VectorXd y = x;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd next = y - (2.0 * gram * y) / lipschitz;
    project_to_simplex(std::span<double>(next.data(), static_cast<std::size_t>(next.size())));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = std::move(next);
    t = t_next;
  }
  return {x, (generators * x).norm()};
}

}  // namespace

MinNormPoint min_norm_in_hull(const Eigen::MatrixXd& generators) {
  if (generators.cols() == 0) throw std::invalid_argument("min_norm_in_hull: no generators");
  if (static_cast<std::size_t>(generators.cols()) <= kMaxEnumeratedGenerators) {
    return enumerate_supports(generators);
  }
  return projected_gradient(generators);
}

}  // namespace fairkm
