#include "fairkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairkm/clustering.hpp"
#include "fairkm/cost.hpp"
#include "fairkm/errors.hpp"

namespace fairkm {

Vector per_group_cost(const Dataset& dataset, const CenterSet& centers,
                      const Assignment& assignment) {
  Vector costs(static_cast<Eigen::Index>(dataset.m()));
  for (std::size_t j = 0; j < dataset.m(); ++j) {
    costs[static_cast<Eigen::Index>(j)] =
        kmeans_cost(centers, dataset, assignment, static_cast<int>(j)) /
        static_cast<double>(dataset.group_sizes()[j]);
  }
  return costs;
}

double max_cost_ratio(const Vector& group_costs) {
  if (group_costs.size() < 2) throw UnsupportedModeError("max_cost_ratio needs at least two groups");
  const double hi = group_costs.maxCoeff();
  const double lo = group_costs.minCoeff();
  if (hi == 0.0) return 1.0;
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double max_cost_ratio(const ClusteringResult& result, const Dataset& dataset) {
  return max_cost_ratio(per_group_cost(dataset, result.centers, result.assignment));
}

double overall_cost(const Dataset& dataset, const CenterSet& centers, const Assignment& assignment) {
  return kmeans_cost(centers, dataset, assignment) / static_cast<double>(dataset.n());
}

double balance(const Dataset& dataset, const Assignment& assignment) {
  if (dataset.m() != 2) throw UnsupportedModeError("balance is defined for exactly two groups");
  if (assignment.size() != dataset.n()) throw std::invalid_argument("balance: assignment size");
  const auto k = static_cast<std::size_t>(assignment.k);
  std::vector<std::size_t> a(k, 0), b(k, 0);
  for (std::size_t p = 0; p < dataset.n(); ++p) {
    auto& bucket = dataset.group_of(p) == 0 ? a : b;
    ++bucket[static_cast<std::size_t>(assignment.cluster_of[p])];
  }
  double result = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] + b[i] == 0) continue;
    if (a[i] == 0 || b[i] == 0) return 0.0;
    const double ab = static_cast<double>(a[i]) / static_cast<double>(b[i]);
    result = std::min(result, std::min(ab, 1.0 / ab));
  }
  return result;
}

double price_of_fairness(double fair_overall_cost, double baseline_overall_cost) {
  if (baseline_overall_cost == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (fair_overall_cost - baseline_overall_cost) / baseline_overall_cost;
}

double price_of_fairness(const ClusteringResult& fair, const ClusteringResult& baseline,
                         const Dataset& dataset) {
  if (fair.centers.k() != baseline.centers.k()) {
    throw std::invalid_argument("price_of_fairness: results use different k");
  }
  return price_of_fairness(overall_cost(dataset, fair.centers, fair.assignment),
                           overall_cost(dataset, baseline.centers, baseline.assignment));
}

MetricsReport compute_metrics(const Dataset& dataset, const ClusteringResult& result,
                              const ClusteringResult* baseline) {
  MetricsReport report;
  report.per_group_cost = per_group_cost(dataset, result.centers, result.assignment);
  if (dataset.m() >= 2) report.max_cost_ratio = max_cost_ratio(report.per_group_cost);
  report.overall_cost = overall_cost(dataset, result.centers, result.assignment);
  if (dataset.m() == 2) report.balance = balance(dataset, result.assignment);
  if (baseline) report.price_of_fairness = price_of_fairness(result, *baseline, dataset);
  return report;
}

}  // namespace fairkm
