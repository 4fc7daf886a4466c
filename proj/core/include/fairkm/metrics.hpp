#pragma once

#include <optional>

#include "fairkm/types.hpp"

namespace fairkm {

struct ClusteringResult;

/// Quality and fairness summary of one clustering. Ratios that are undefined
/// are kept as sentinels: +inf for a zero denominator under a positive
/// numerator, NaN for price of fairness against a zero-cost baseline.
struct MetricsReport {
  Vector per_group_cost;                    // Delta(C, U ∩ A_j) / |A_j|
  std::optional<double> max_cost_ratio;     // m >= 2 only
  double overall_cost = 0.0;                // Delta(C, U) / n
  std::optional<double> balance;            // m == 2 only
  std::optional<double> price_of_fairness;  // when a baseline is given
};

/// Average cost of every group from the raw points.
Vector per_group_cost(const Dataset& dataset, const CenterSet& centers,
                      const Assignment& assignment);

/// max_{j, j'} cost_j / cost_j' over positive denominators; +inf if some
/// group has zero cost while another is positive; 1 if all are zero.
/// Throws UnsupportedModeError for fewer than two groups.
double max_cost_ratio(const Vector& group_costs);
double max_cost_ratio(const ClusteringResult& result, const Dataset& dataset);

/// Delta(C, U) / n.
double overall_cost(const Dataset& dataset, const CenterSet& centers, const Assignment& assignment);

/// min over non-empty clusters of min(|A ∩ U_i| / |B ∩ U_i|, |B ∩ U_i| / |A ∩ U_i|);
/// a cluster missing either group gives 0. Requires m == 2.
double balance(const Dataset& dataset, const Assignment& assignment);

/// (fair - baseline) / baseline for mean costs; NaN when baseline == 0.
double price_of_fairness(double fair_overall_cost, double baseline_overall_cost);
double price_of_fairness(const ClusteringResult& fair, const ClusteringResult& baseline,
                         const Dataset& dataset);

MetricsReport compute_metrics(const Dataset& dataset, const ClusteringResult& result,
                              const ClusteringResult* baseline = nullptr);

}  // namespace fairkm
