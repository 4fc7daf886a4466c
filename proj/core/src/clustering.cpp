#include "fairkm/clustering.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "fairkm/cost.hpp"
#include "fairkm/summation.hpp"

namespace fairkm {

namespace {

using Index = Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

enum class Objective { mean_cost, max_group_cost, sum_group_cost };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double objective_of(Objective kind, const Vector& costs) {
  switch (kind) {
    case Objective::mean_cost:
    case Objective::max_group_cost:
      return costs.maxCoeff();
    case Objective::sum_group_cost: {
      CompensatedSum s;
      for (Index j = 0; j < costs.size(); ++j) s.add(costs[j]);
      return s.value();
    }
  }
  return 0.0;
}

GroupClusterStats stats_for(Objective kind, const Dataset& dataset, const Assignment& assignment) {
  return kind == Objective::mean_cost ? compute_pooled_stats(dataset, assignment)
                                      : compute_group_stats(dataset, assignment);
}

RowMatrix cluster_means(const GroupClusterStats& stats) {
  // Pooled stats (m == 1): the single cell mean is the cluster mean.
  RowMatrix c = RowMatrix::Zero(ix(stats.k), ix(stats.d));
  for (std::size_t i = 0; i < stats.k; ++i) {
    if (stats.present(i, 0)) c.row(ix(i)) = stats.mean(i, 0);
  }
  return c;
}

struct CenterStepResult {
  RowMatrix centers;
  std::optional<FairSolveReport> report;
};

CenterStepResult center_step(Objective kind, const GroupClusterStats& stats,
                             const SolverConfig& solver) {
  switch (kind) {
    case Objective::mean_cost:
      return {cluster_means(stats), std::nullopt};
    case Objective::max_group_cost: {
      FairSolveReport report = solve_fair_step(stats, solver);
      RowMatrix c = report.centers.matrix();
      return {std::move(c), std::move(report)};
    }
    case Objective::sum_group_cost: {
      const Vector uniform = Vector::Constant(ix(stats.m), 1.0 / static_cast<double>(stats.m));
      const Eigen::MatrixXd w = weights_from_gamma(uniform, stats);
      RowMatrix c = RowMatrix::Zero(ix(stats.k), ix(stats.d));
      for (std::size_t i = 0; i < stats.k; ++i) {
        for (std::size_t j = 0; j < stats.m; ++j) {
          if (w(ix(i), ix(j)) != 0.0) c.row(ix(i)) += w(ix(i), ix(j)) * stats.mean(i, j);
        }
      }
      return {std::move(c), std::nullopt};
    }
  }
  throw std::logic_error("unreachable");
}

ClusteringResult run_loop(Objective kind, const Dataset& dataset, const CenterSet& initial,
                          int max_iterations, double tolerance, const SolverConfig& solver) {
  if (initial.d() != dataset.d()) throw std::invalid_argument("initial centers: dimension mismatch");
  ClusteringResult result;
  RowMatrix centers = initial.matrix();
  Assignment assignment = assign_points(dataset, initial);
  GroupClusterStats stats = stats_for(kind, dataset, assignment);
  double current = objective_of(kind, group_costs(CenterSet(centers), stats));
  result.objective_trace.push_back(current);

  for (int round = 1; round <= max_iterations; ++round) {
    result.iterations_run = round;
    CenterStepResult step = center_step(kind, stats, solver);
    const double solved = objective_of(kind, group_costs(CenterSet(step.centers), stats));
    // A solver that stops within tolerance can land marginally above the
    // incumbent; keeping the old centers preserves the monotone trace.
    if (solved <= current) {
      centers = std::move(step.centers);
    }
    if (step.report) result.fair_report = std::move(step.report);
    reseed_empty_clusters(dataset, assignment, centers);

    Assignment next = assign_points(dataset, CenterSet(centers));
    const bool unchanged = next == assignment;
    assignment = std::move(next);
    stats = stats_for(kind, dataset, assignment);
    const double value = objective_of(kind, group_costs(CenterSet(centers), stats));
    result.objective_trace.push_back(value);
    const double improvement = current - value;
    current = value;
    if (unchanged) break;
    if (improvement <= tolerance * std::abs(current)) break;
  }
  result.centers = CenterSet(std::move(centers));
  result.assignment = std::move(assignment);
  return result;
}

template <typename RunOne>
ClusteringResult best_of_restarts(const Dataset& dataset, const ClusteringConfig& config,
                                  RunOne run_one) {
  config.validate(dataset);
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::optional<ClusteringResult>> results(static_cast<std::size_t>(config.restarts));
  const int workers = std::clamp(config.threads, 1, config.restarts);
  if (workers == 1) {
    for (int r = 0; r < config.restarts; ++r) results[static_cast<std::size_t>(r)] = run_one(r);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = w; r < config.restarts; r += workers) {
            results[static_cast<std::size_t>(r)] = run_one(r);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  int best = 0;
  for (int r = 1; r < config.restarts; ++r) {
    if (results[static_cast<std::size_t>(r)]->objective() <
        results[static_cast<std::size_t>(best)]->objective()) {
      best = r;
    }
  }
  ClusteringResult out = std::move(*results[static_cast<std::size_t>(best)]);
  out.best_restart = best;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

std::string_view to_string(InitMethod init) {
  switch (init) {
    case InitMethod::random:
      return "random";
    case InitMethod::kmeanspp:
      return "kmeanspp";
    case InitMethod::weighted_lloyd:
      return "weighted";
    case InitMethod::random_partition:
      return "partition";
    case InitMethod::mixed:
      return "mixed";
  }
  return "unknown";
}

InitMethod parse_init_method(std::string_view name) {
  if (name == "random") return InitMethod::random;
  if (name == "kmeanspp" || name == "kmeans++") return InitMethod::kmeanspp;
  if (name == "weighted" || name == "weighted_lloyd") return InitMethod::weighted_lloyd;
  if (name == "partition" || name == "random_partition") return InitMethod::random_partition;
  if (name == "mixed") return InitMethod::mixed;
  throw std::invalid_argument("unknown init method '" + std::string(name) +
                              "' (expected random, kmeanspp, weighted, partition or mixed)");
}

void ClusteringConfig::validate(const Dataset& dataset) const {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (k > dataset.n()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the number of points " +
                                std::to_string(dataset.n()));
  }
  if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(relative_tolerance >= 0.0)) throw std::invalid_argument("relative_tolerance must be >= 0");
}

Assignment assign_points(const Dataset& dataset, const CenterSet& centers) {
  if (centers.d() != dataset.d()) throw std::invalid_argument("assign_points: dimension mismatch");
  const std::size_t k = centers.k();
  std::vector<int> cluster_of(dataset.n());
  const RowMatrix& c = centers.matrix();
  for (std::size_t p = 0; p < dataset.n(); ++p) {
    const auto point = dataset.point(p);
    int best = 0;
    double best_dist = (point - c.row(0)).squaredNorm();
    for (std::size_t i = 1; i < k; ++i) {
      const double dist = (point - c.row(ix(i))).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(i);
      }
    }
    cluster_of[p] = best;
  }
  return Assignment(std::move(cluster_of), static_cast<int>(k));
}

void reseed_empty_clusters(const Dataset& dataset, const Assignment& assignment,
                           RowMatrix& centers) {
  const std::vector<std::size_t> sizes = assignment.cluster_sizes();
  std::vector<bool> used(dataset.n(), false);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] != 0) continue;
    std::size_t far = dataset.n();
    double far_dist = -1.0;
    for (std::size_t p = 0; p < dataset.n(); ++p) {
      if (used[p]) continue;
      const double dist =
          (dataset.point(p) - centers.row(assignment.cluster_of[p])).squaredNorm();
      if (dist > far_dist) {
        far_dist = dist;
        far = p;
      }
    }
    if (far == dataset.n()) return;  // more empty clusters than points
    used[far] = true;
    centers.row(ix(i)) = dataset.point(far);
  }
}

CenterSet update_means(const Dataset& dataset, const Assignment& assignment) {
  RowMatrix c = cluster_means(compute_pooled_stats(dataset, assignment));
  reseed_empty_clusters(dataset, assignment, c);
  return CenterSet(std::move(c));
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(restart) + 1));
}

CenterSet init_random(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > dataset.n()) throw std::invalid_argument("init_random: need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> indices(dataset.n());
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::sample(indices.begin(), indices.end(), std::back_inserter(chosen), ix(k), rng);
  std::shuffle(chosen.begin(), chosen.end(), rng);
  RowMatrix c(ix(k), ix(dataset.d()));
  for (std::size_t i = 0; i < k; ++i) c.row(ix(i)) = dataset.point(chosen[i]);
  return CenterSet(std::move(c));
}

CenterSet init_kmeanspp(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > dataset.n()) throw std::invalid_argument("init_kmeanspp: need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  const std::size_t n = dataset.n();
  RowMatrix c(ix(k), ix(dataset.d()));
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  c.row(0) = dataset.point(first(rng));
  std::vector<double> nearest(n);
  for (std::size_t p = 0; p < n; ++p) nearest[p] = (dataset.point(p) - c.row(0)).squaredNorm();
  for (std::size_t i = 1; i < k; ++i) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      std::discrete_distribution<std::size_t> d2(nearest.begin(), nearest.end());
      pick = d2(rng);
    } else {
      pick = first(rng);  // every point coincides with a chosen center
    }
    c.row(ix(i)) = dataset.point(pick);
    for (std::size_t p = 0; p < n; ++p) {
      nearest[p] = std::min(nearest[p], (dataset.point(p) - c.row(ix(i))).squaredNorm());
    }
  }
  return CenterSet(std::move(c));
}

CenterSet init_random_partition(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > dataset.n()) throw std::invalid_argument("init_random_partition: need 1 <= k <= n");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(dataset.n());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> cluster(dataset.n());
  std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
  // The first k shuffled points pin one member per cluster.
  for (std::size_t r = 0; r < order.size(); ++r) {
    cluster[order[r]] = r < k ? static_cast<int>(r) : pick(rng);
  }
  return update_means(dataset, Assignment(std::move(cluster), static_cast<int>(k)));
}

CenterSet init_weighted_lloyd(const Dataset& dataset, std::size_t k, std::uint64_t seed,
                              int max_iterations) {
  const CenterSet start = init_random(dataset, k, seed);
  return run_loop(Objective::sum_group_cost, dataset, start, max_iterations, 1e-10,
                  SolverConfig{})
      .centers;
}

CenterSet initialize(const Dataset& dataset, std::size_t k, InitMethod init, std::uint64_t seed,
                     int restart) {
  switch (init) {
    case InitMethod::random:
      return init_random(dataset, k, seed);
    case InitMethod::kmeanspp:
      return init_kmeanspp(dataset, k, seed);
    case InitMethod::weighted_lloyd:
      return init_weighted_lloyd(dataset, k, seed);
    case InitMethod::random_partition:
      return init_random_partition(dataset, k, seed);
    case InitMethod::mixed:
      return restart % 2 == 0 ? init_random(dataset, k, seed) : init_random_partition(dataset, k, seed);
  }
  throw std::invalid_argument("unknown init method");
}

double weighted_objective(const Dataset& dataset, const CenterSet& centers) {
  const GroupClusterStats stats = compute_group_stats(dataset, assign_points(dataset, centers));
  return objective_of(Objective::sum_group_cost, group_costs(centers, stats));
}

double fair_objective(const Dataset& dataset, const CenterSet& centers) {
  const GroupClusterStats stats = compute_group_stats(dataset, assign_points(dataset, centers));
  return fair_objective(centers, stats);
}

FairSolveReport solve_fair_step(const GroupClusterStats& stats, const SolverConfig& solver) {
  if (stats.m == 1) {
    // The fair center of a single group is the cluster mean.
    RowMatrix c = cluster_means(stats);
    FairSolveReport report;
    report.centers = CenterSet(c);
    report.gamma = Vector::Ones(1);
    report.group_costs = group_costs(report.centers, stats);
    report.objective = report.group_costs[0];
    report.lower_bound = report.objective;
    report.certificate_gap = 0.0;
    report.iterations = 0;
    return report;
  }
  if (stats.m == 2) {
    SolverConfig line = SolverConfig::defaults(SolverMode::line_search);
    line.equal_cost_tolerance = solver.equal_cost_tolerance;
    return line_search_2groups(stats, line);
  }
  SolverConfig mwu = solver;
  mwu.mode = SolverMode::mwu;
  FairSolveReport report = solve_mwu(stats, mwu);
  if (report.certificate_gap <= 0.01 * report.objective) return report;
  FairSolveReport polished = solve_subgradient(stats, SolverConfig::defaults(SolverMode::subgradient),
                                               weights_from_gamma(report.gamma, stats));
  polished.lower_bound = std::max(polished.lower_bound, report.lower_bound);
  polished.lower_bound = std::min(polished.lower_bound, polished.objective);
  polished.certificate_gap = polished.objective - polished.lower_bound;
  return polished.objective <= report.objective ? polished : report;
}

ClusteringResult lloyd_from(const Dataset& dataset, const CenterSet& initial,
                            const ClusteringConfig& config) {
  return run_loop(Objective::mean_cost, dataset, initial, config.max_outer_iterations,
                  config.relative_tolerance, SolverConfig{});
}

ClusteringResult fair_lloyd_from(const Dataset& dataset, const CenterSet& initial,
                                 const ClusteringConfig& config, const SolverConfig& solver) {
  solver.validate();
  return run_loop(Objective::max_group_cost, dataset, initial, config.max_outer_iterations,
                  config.relative_tolerance, solver);
}

ClusteringResult lloyd(const Dataset& dataset, const ClusteringConfig& config) {
  return best_of_restarts(dataset, config, [&](int r) {
    const CenterSet start =
        initialize(dataset, config.k, config.init, restart_seed(config.seed, r), r);
    return lloyd_from(dataset, start, config);
  });
}

ClusteringResult fair_lloyd(const Dataset& dataset, const ClusteringConfig& config,
                            const SolverConfig& solver) {
  return best_of_restarts(dataset, config, [&](int r) {
    const CenterSet start =
        initialize(dataset, config.k, config.init, restart_seed(config.seed, r), r);
    return fair_lloyd_from(dataset, start, config, solver);
  });
}

}  // namespace fairkm
