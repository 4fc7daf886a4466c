#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fairkm/fair_solver.hpp"
#include "fairkm/types.hpp"

namespace fairkm {

/// `mixed` alternates over restarts: even restarts seed from random data
/// points, odd restarts from a random partition.
enum class InitMethod { random, kmeanspp, weighted_lloyd, random_partition, mixed };

std::string_view to_string(InitMethod init);
/// Accepts "random", "kmeanspp", "weighted" (or "weighted_lloyd"), "partition" and "mixed".
InitMethod parse_init_method(std::string_view name);

struct ClusteringConfig {
  std::size_t k = 2;
  int max_outer_iterations = 200;
  int restarts = 1;
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::random;
  /// Stop when the objective improves by less than this fraction.
  double relative_tolerance = 1e-10;
  /// Restart-level worker threads. Results do not depend on this value.
  int threads = 1;

  /// Throws std::invalid_argument (k > n, k == 0, restarts < 1, ...).
  void validate(const Dataset& dataset) const;
};

struct ClusteringResult {
  CenterSet centers;
  Assignment assignment;
  /// Objective after each round, starting with the initial assignment.
  /// Mean cost for Lloyd, max group cost for Fair-Lloyd.
  std::vector<double> objective_trace;
  /// Last fixed-partition solve (Fair-Lloyd only).
  std::optional<FairSolveReport> fair_report;
  int iterations_run = 0;
  int best_restart = 0;
  /// Seconds for the whole restart loop.
  double wall_time = 0.0;

  double objective() const { return objective_trace.back(); }
};

/// Nearest center per point; ties go to the lowest cluster index.
Assignment assign_points(const Dataset& dataset, const CenterSet& centers);

/// Cluster means. An empty cluster is re-seeded at the point farthest from its
/// own cluster mean (lowest point index on ties; a point is used at most once).
CenterSet update_means(const Dataset& dataset, const Assignment& assignment);

/// Moves the center of every empty cluster onto the farthest remaining point,
/// measured against the given centers. Used by all center steps.
void reseed_empty_clusters(const Dataset& dataset, const Assignment& assignment,
                           RowMatrix& centers);

CenterSet init_random(const Dataset& dataset, std::size_t k, std::uint64_t seed);
CenterSet init_kmeanspp(const Dataset& dataset, std::size_t k, std::uint64_t seed);
/// Means of a uniformly random partition with no empty cluster. Reaches
/// starting partitions that no choice of k data points as centers induces.
CenterSet init_random_partition(const Dataset& dataset, std::size_t k, std::uint64_t seed);
/// Lloyd on the sum of group-average costs (point weight 1 / |A_j|), started
/// from init_random. The result is a constant-factor seed for Fair-Lloyd.
CenterSet init_weighted_lloyd(const Dataset& dataset, std::size_t k, std::uint64_t seed,
                              int max_iterations = 200);
CenterSet initialize(const Dataset& dataset, std::size_t k, InitMethod init, std::uint64_t seed,
                     int restart = 0);

/// Seed of restart r, derived from the base seed.
std::uint64_t restart_seed(std::uint64_t seed, int restart);

/// Sum of group-average costs g(C) for the partition induced by C.
double weighted_objective(const Dataset& dataset, const CenterSet& centers);
/// Max group-average cost for the partition induced by C.
double fair_objective(const Dataset& dataset, const CenterSet& centers);

/// Single run of Lloyd from the given centers.
ClusteringResult lloyd_from(const Dataset& dataset, const CenterSet& initial,
                            const ClusteringConfig& config);
/// Single run of Fair-Lloyd from the given centers.
ClusteringResult fair_lloyd_from(const Dataset& dataset, const CenterSet& initial,
                                 const ClusteringConfig& config, const SolverConfig& solver);

/// Best of `config.restarts` runs by final mean cost.
ClusteringResult lloyd(const Dataset& dataset, const ClusteringConfig& config);
/// Best of `config.restarts` runs by final max group cost. The per-round
/// center step is the line search for two groups and multiplicative weights
/// (polished by the subgradient oracle when its gap exceeds 1%) beyond that.
/// `solver.mode` is ignored; its iteration cap applies to the MWU stage.
ClusteringResult fair_lloyd(const Dataset& dataset, const ClusteringConfig& config,
                            const SolverConfig& solver = SolverConfig::defaults(SolverMode::mwu));

/// Fixed-partition fair centers with the same strategy fair_lloyd uses.
FairSolveReport solve_fair_step(const GroupClusterStats& stats, const SolverConfig& solver);

}  // namespace fairkm
