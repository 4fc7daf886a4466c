#include <benchmark/benchmark.h>

#include <random>

#include "fairkm/clustering.hpp"
#include "fairkm/cost.hpp"
#include "fairkm/fair_solver.hpp"
#include "fairkm/synthetic.hpp"

using namespace fairkm;

namespace {

SyntheticParams wide_params(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 4.0);
  SyntheticParams p;
  p.seed = seed;
  p.blob_centers.resize(10, 10);
  for (Eigen::Index r = 0; r < 10; ++r) {
    for (Eigen::Index c = 0; c < 10; ++c) p.blob_centers(r, c) = normal(rng);
  }
  p.groups.push_back({"A", n * 7 / 10, Vector::Zero(10), Vector::Constant(10, 1.0)});
  p.groups.push_back({"B", n - n * 7 / 10, Vector::Constant(10, 0.5), Vector::Constant(10, 0.6)});
  return p;
}

GroupClusterStats stats_for(const Dataset& data, std::size_t k) {
  return compute_group_stats(data, assign_points(data, init_kmeanspp(data, k, 1)));
}

void BM_LineSearch(benchmark::State& state) {
  const auto data = generate_synthetic(wide_params(static_cast<std::size_t>(state.range(0)), 5)).dataset;
  const auto st = stats_for(data, 10);
  const auto cfg = SolverConfig::defaults(SolverMode::line_search);
  for (auto _ : state) benchmark::DoNotOptimize(line_search_2groups(st, cfg));
}
BENCHMARK(BM_LineSearch)->Arg(1000)->Arg(100000);

void BM_Mwu(benchmark::State& state) {
  const auto data = generate_synthetic(three_group_params(3000, 6)).dataset;
  const auto st = stats_for(data, static_cast<std::size_t>(state.range(0)));
  const auto cfg = SolverConfig::defaults(SolverMode::mwu);
  for (auto _ : state) benchmark::DoNotOptimize(solve_mwu(st, cfg));
}
BENCHMARK(BM_Mwu)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Subgradient(benchmark::State& state) {
  const auto data = generate_synthetic(three_group_params(3000, 7)).dataset;
  const auto st = stats_for(data, static_cast<std::size_t>(state.range(0)));
  const auto cfg = SolverConfig::defaults(SolverMode::subgradient);
  for (auto _ : state) benchmark::DoNotOptimize(solve_subgradient(st, cfg));
}
BENCHMARK(BM_Subgradient)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LloydRound(benchmark::State& state) {
  const auto data = generate_synthetic(wide_params(10000, 8)).dataset;
  const auto init = init_kmeanspp(data, 10, 2);
  ClusteringConfig cfg;
  cfg.k = 10;
  cfg.max_outer_iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lloyd_from(data, init, cfg));
}
BENCHMARK(BM_LloydRound)->Unit(benchmark::kMillisecond);

void BM_FairLloydRound(benchmark::State& state) {
  const auto data = generate_synthetic(wide_params(10000, 8)).dataset;
  const auto init = init_kmeanspp(data, 10, 2);
  ClusteringConfig cfg;
  cfg.k = 10;
  cfg.max_outer_iterations = 1;
  const auto solver = SolverConfig::defaults(SolverMode::line_search);
  for (auto _ : state) benchmark::DoNotOptimize(fair_lloyd_from(data, init, cfg, solver));
}
BENCHMARK(BM_FairLloydRound)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
