#include <gtest/gtest.h>

#include <random>

#include "fairkm/cost.hpp"
#include "fairkm/summation.hpp"
#include "support.hpp"

using namespace fairkm;
using namespace fairkm::testing;

TEST(Dataset, RejectsMissingGroupAndBadShapes) {
  EXPECT_THROW(Dataset(rows({{1.0}, {2.0}}), {0, 2}), std::invalid_argument);  // group 1 empty
  EXPECT_THROW(Dataset(rows({{1.0}, {2.0}}), {0}), std::invalid_argument);
  EXPECT_THROW(Dataset(rows({{1.0}}), {0}, 2), std::invalid_argument);
  EXPECT_THROW(Dataset(rows({{std::nan("")}}), {0}), std::invalid_argument);
  const Dataset ok(rows({{1.0}, {2.0}, {3.0}}), {1, 0, 1});
  EXPECT_EQ(ok.m(), 2u);
  EXPECT_EQ(ok.group_sizes()[0], 1u);
  EXPECT_EQ(ok.group_sizes()[1], 2u);
}

TEST(Assignment, RejectsOutOfRangeCluster) {
  EXPECT_THROW(Assignment({0, 3}, 3), std::invalid_argument);
  EXPECT_THROW(Assignment({0}, 0), std::invalid_argument);
  EXPECT_EQ(Assignment({0, 2, 2}, 3).cluster_sizes(), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(CenterSet, RejectsNonFinite) {
  EXPECT_THROW(CenterSet(rows({{std::numeric_limits<double>::infinity()}})), std::invalid_argument);
}

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSummation) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-15, 1e-30);
}

TEST(KmeansCost, PointAtItsCenterCostsNothing) {
  const Dataset ds(rows({{1.5, -2.0}}), {0});
  EXPECT_EQ(kmeans_cost(CenterSet(rows({{1.5, -2.0}})), ds, Assignment({0}, 1)), 0.0);
}

TEST(KmeansCost, SymmetricPairAroundZero) {
  const Dataset ds(rows({{-1.0}, {1.0}}), {0, 0});
  EXPECT_DOUBLE_EQ(kmeans_cost(CenterSet(rows({{0.0}})), ds, Assignment({0, 0}, 1)), 2.0);
}

TEST(KmeansCost, AppendixGroupOneAtItsOwnMeansIsZero) {
  const auto fx = appendix_points();
  const CenterSet at_group_one(rows({{0, 0}, {0, 0}}));
  EXPECT_EQ(kmeans_cost(at_group_one, fx.dataset, fx.assignment, 0), 0.0);
}

TEST(KmeansCost, ShapeMismatchesThrow) {
  const Dataset ds(rows({{0.0, 1.0}, {1.0, 1.0}}), {0, 0});
  EXPECT_THROW(kmeans_cost(CenterSet(rows({{0.0}})), ds, Assignment({0, 0}, 1)), std::invalid_argument);
  EXPECT_THROW(kmeans_cost(CenterSet(rows({{0.0, 0.0}})), ds, Assignment({0, 1}, 2)), std::invalid_argument);
  EXPECT_THROW(kmeans_cost(CenterSet(rows({{0.0, 0.0}})), ds, Assignment({0, 0}, 1), 4),
               std::invalid_argument);
}

TEST(GroupCost, AtGroupMeansEqualsBaseCost) {
  const auto st = appendix_stats();
  for (std::size_t j = 0; j < 3; ++j) {
    const CenterSet at(rows({{st.mean(0, j)[0], st.mean(0, j)[1]}, {st.mean(1, j)[0], st.mean(1, j)[1]}}));
    EXPECT_DOUBLE_EQ(group_cost(at, st, j), st.base_cost[static_cast<Index>(j)]);
  }
}

TEST(GroupCost, AppendixTableValues) {
  const auto st = appendix_stats();
  EXPECT_DOUBLE_EQ(group_cost(CenterSet(rows({{2, 2}, {2, 2}})), st, 1), 1.0);
  const CenterSet origin(rows({{0, 0}, {0, 0}}));
  EXPECT_NEAR(group_cost(origin, st, 2), 10.1, 1e-12);
  // f_2 = 1 + 0.01 * 8 + 0.99 * 8 = 9
  EXPECT_NEAR(group_cost(origin, st, 1), 9.0, 1e-12);
  EXPECT_NEAR(fair_objective(origin, st), 10.1, 1e-12);
  EXPECT_THROW(group_cost(origin, st, 3), std::invalid_argument);
}

TEST(GroupCost, AppendixMatchesPointLevelCost) {
  const auto fx = appendix_points();
  const auto st = compute_group_stats(fx.dataset, fx.assignment);
  const auto table = appendix_stats();
  EXPECT_TRUE(st.frac.isApprox(table.frac, 1e-15));
  EXPECT_NEAR((st.base_cost - table.base_cost).cwiseAbs().maxCoeff(), 0.0, 1e-13);
  const RowMatrix c = rows({{0, 0}, {0, 0}});
  const Vector brute = brute_group_costs(fx.dataset, fx.assignment, c);
  EXPECT_NEAR(brute[2], 10.1, 1e-12);
  EXPECT_NEAR(group_cost(CenterSet(c), st, 2), brute[2], 1e-12);
}

TEST(FairObjective, SingleGroupIsMeanCost) {
  std::mt19937_64 rng(3);
  const auto fx = random_points(rng, 40, 3, 1, 4);
  const auto st = compute_group_stats(fx.dataset, fx.assignment);
  const CenterSet c(rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_NEAR(fair_objective(c, st), kmeans_cost(c, fx.dataset, fx.assignment) / 40.0, 1e-12);
}

TEST(FairObjective, EqualizedOneDimensionalPair) {
  // A = {-1, 1}, B = {3}, single cluster, center 4/3: both groups cost 25/9.
  const Dataset ds(rows({{-1.0}, {1.0}, {3.0}}), {0, 0, 1});
  const auto st = compute_group_stats(ds, Assignment({0, 0, 0}, 1));
  const CenterSet c(rows({{4.0 / 3.0}}));
  EXPECT_NEAR(group_cost(c, st, 0), 25.0 / 9.0, 1e-14);
  EXPECT_NEAR(group_cost(c, st, 1), 25.0 / 9.0, 1e-14);
  EXPECT_NEAR(fair_objective(c, st), 25.0 / 9.0, 1e-14);
}

TEST(GroupStats, SymmetricPair) {
  const Dataset ds(rows({{0.0}, {2.0}}), {0, 0});
  const auto st = compute_group_stats(ds, Assignment({0, 0}, 1));
  EXPECT_EQ(st.frac(0, 0), 1.0);
  EXPECT_EQ(st.mean(0, 0)[0], 1.0);
  EXPECT_EQ(st.base_cost[0], 1.0);
}

TEST(GroupStats, WholeGroupInOneCluster) {
  const Dataset ds(rows({{0.0}, {1.0}, {5.0}, {6.0}}), {0, 0, 1, 1});
  const auto st = compute_group_stats(ds, Assignment({0, 0, 1, 2}, 3));
  EXPECT_EQ(st.frac(0, 0), 1.0);
  EXPECT_EQ(st.frac(1, 0), 0.0);
  EXPECT_EQ(st.frac(2, 0), 0.0);
  EXPECT_FALSE(st.present(1, 0));
  EXPECT_EQ(st.frac(1, 1), 0.5);
}

TEST(GroupStats, FromTableValidates) {
  Eigen::MatrixXd frac(2, 1);
  frac << 0.5, 0.6;
  const std::vector<std::vector<Vector>> means = {{vec({0})}, {vec({1})}};
  EXPECT_THROW(GroupClusterStats::from_table(frac, means, vec({0.0})), std::invalid_argument);
  frac << 0.5, 0.5;
  EXPECT_THROW(GroupClusterStats::from_table(frac, means, vec({-1.0})), std::invalid_argument);
}

// Random datasets, assignments and centers: the O(k d) decomposition equals
// the point-level sum, and frac columns are stochastic.
TEST(Properties, DecompositionIdentityAndColumnStochasticity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 4;
    const std::size_t k = 1 + trial % 5;
    const auto fx = random_points(rng, 50, 1 + trial % 4, m, k);
    const auto st = compute_group_stats(fx.dataset, fx.assignment);
    RowMatrix c(static_cast<Index>(k), static_cast<Index>(fx.dataset.d()));
    for (Index r = 0; r < c.rows(); ++r) {
      for (Index s = 0; s < c.cols(); ++s) c(r, s) = normal(rng);
    }
    const Vector brute = brute_group_costs(fx.dataset, fx.assignment, c);
    for (std::size_t j = 0; j < m; ++j) {
      const double via_stats = group_cost(CenterSet(c), st, j);
      const double via_points = kmeans_cost(CenterSet(c), fx.dataset, fx.assignment, static_cast<int>(j)) /
                                static_cast<double>(fx.dataset.group_sizes()[j]);
      EXPECT_NEAR(via_stats, via_points, 1e-10 * std::max(1.0, via_points));
      EXPECT_NEAR(via_stats, brute[static_cast<Index>(j)], 1e-10 * std::max(1.0, via_points));
      EXPECT_NEAR(st.frac.col(static_cast<Index>(j)).sum(), 1.0, 1e-12);
    }
  }
}

TEST(Properties, FairObjectiveIsConvexInCenters) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto st = random_stats(rng, 4, 3, 2);
    RowMatrix a(4, 2), b(4, 2);
    for (Index r = 0; r < 4; ++r) {
      for (Index s = 0; s < 2; ++s) {
        a(r, s) = normal(rng);
        b(r, s) = normal(rng);
      }
    }
    const double t = unit(rng);
    const double mid = fair_objective(CenterSet(t * a + (1 - t) * b), st);
    const double chord = t * fair_objective(CenterSet(a), st) + (1 - t) * fair_objective(CenterSet(b), st);
    EXPECT_LE(mid, chord + 1e-9);
  }
}

TEST(Properties, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 2.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = random_stats(rng, 3, 3, 2);
    RowMatrix c(3, 2);
    for (Index r = 0; r < 3; ++r) {
      for (Index s = 0; s < 2; ++s) c(r, s) = normal(rng);
    }
    for (std::size_t j = 0; j < st.m; ++j) {
      const RowMatrix grad = group_cost_gradient(CenterSet(c), st, j);
      for (Index r = 0; r < 3; ++r) {
        for (Index s = 0; s < 2; ++s) {
          RowMatrix up = c, down = c;
          up(r, s) += h;
          down(r, s) -= h;
          const double fd = (group_cost(CenterSet(up), st, j) - group_cost(CenterSet(down), st, j)) / (2 * h);
          EXPECT_NEAR(grad(r, s), fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST(Properties, GroupCostMinimisedClusterwiseAtGroupMeans) {
  const auto st = appendix_stats();
  RowMatrix at_means(2, 2);
  at_means.row(0) = st.mean(0, 2);
  at_means.row(1) = st.mean(1, 2);
  EXPECT_NEAR(group_cost_gradient(CenterSet(at_means), st, 2).norm(), 0.0, 1e-15);
}
