#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairkm/types.hpp"

namespace fairkm {

enum class SolverMode { line_search, mwu, subgradient };

std::string_view to_string(SolverMode mode);

struct SolverConfig {
  /// Iteration cap T (bisection steps, MWU rounds, or subgradient warm-start steps).
  int max_iterations = 64;
  /// Relative tolerance for declaring f_A == f_B in the line search.
  double equal_cost_tolerance = 1e-9;
  SolverMode mode = SolverMode::line_search;

  /// Defaults per mode: line search T=64, MWU T=5000, subgradient T=2000.
  static SolverConfig defaults(SolverMode mode);

  void validate() const;
};

/// Outcome of a fixed-partition fair-center solve.
///
/// `lower_bound` is a certified lower bound on the optimum of the convex
/// program, so the true optimum lies in [lower_bound, objective].
struct FairSolveReport {
  CenterSet centers;
  Vector gamma;        // simplex weights, one per group
  Vector group_costs;  // f_j(centers)
  double objective = 0.0;  // max_j f_j(centers)
  double lower_bound = 0.0;
  double certificate_gap = 0.0;  // objective - lower_bound
  int iterations = 0;
};

/// Position of each two-group center along its segment, measured from the
/// group-0 mean: x_i = (1-g) b_i l_i / (g a_i + (1-g) b_i), a = frac(:,0),
/// b = frac(:,1). Clusters missing either group (or with l_i == 0) report 0.
/// Throws UnsupportedModeError unless m == 2.
std::vector<double> x_from_gamma(double gamma, const GroupClusterStats& stats);

/// c_i = sum_j gamma_j frac(i,j) mean(i,j) / sum_j gamma_j frac(i,j).
/// Throws DegenerateClusterError if a cluster's denominator is zero.
CenterSet centers_from_gamma(const Vector& gamma, const GroupClusterStats& stats);

/// || sum_j gamma_j grad f_j(C) || over all k*d center coordinates.
double stationarity_residual(const Vector& gamma, const CenterSet& centers,
                             const GroupClusterStats& stats);

/// Smallest stationarity residual over any gamma supported on `subset`
/// (all groups when empty), i.e. the distance of C from Z_S in gradient terms.
double min_stationarity_residual(const CenterSet& centers, const GroupClusterStats& stats,
                                 std::span<const std::size_t> subset = {});

/// Two-group bisection over gamma. Requires m == 2.
FairSolveReport line_search_2groups(const GroupClusterStats& stats, const SolverConfig& config);

/// Multiplicative-weights search over the gamma simplex; returns the best
/// iterate and a certified lower bound.
FairSolveReport solve_mwu(const GroupClusterStats& stats, const SolverConfig& config);

/// General convex oracle over per-cluster simplex weights (centers in the hull
/// of their present group means). `warm_weights` (k x m, rows on the simplex
/// over present groups) seeds the search when given.
FairSolveReport solve_subgradient(const GroupClusterStats& stats, const SolverConfig& config,
                                  const std::optional<Eigen::MatrixXd>& warm_weights = std::nullopt);

/// min_{j in S} f_j(centers), a lower bound on the optimum whenever the
/// centers lie on Z_S. Verifies stationarity (residual <= 1e-6) and throws
/// InvalidCertificateError otherwise. Empty subset means all groups.
double certificate_lower_bound(const CenterSet& centers, const GroupClusterStats& stats,
                               std::span<const std::size_t> subset = {});

/// Per-cluster simplex weights reproducing the gamma-parametrized centers.
Eigen::MatrixXd weights_from_gamma(const Vector& gamma, const GroupClusterStats& stats);

/// Dispatches on config.mode.
FairSolveReport solve_fair_centers(const GroupClusterStats& stats, const SolverConfig& config);

}  // namespace fairkm
