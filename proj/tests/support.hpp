#pragma once

// Shared fixtures and brute-force oracles for the test binaries. Nothing in
// here calls the solvers it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "fairkm/types.hpp"

namespace fairkm::testing {

using Index = Eigen::Index;

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline RowMatrix rows(std::initializer_list<std::initializer_list<double>> values) {
  const auto r = static_cast<Index>(values.size());
  const auto c = static_cast<Index>(values.begin()->size());
  RowMatrix m(r, c);
  Index i = 0;
  for (const auto& row : values) {
    Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

/// The k = 2, m = 3 table instance: every group has the same mean in both
/// clusters, so only the fractions and base costs differ.
inline GroupClusterStats appendix_stats() {
  Eigen::MatrixXd frac(2, 3);
  frac << 0.9, 0.01, 0.95,  //
      0.1, 0.99, 0.05;
  const std::vector<Vector> group_means = {vec({0, 0}), vec({2, 2}), vec({3, 1})};
  const std::vector<std::vector<Vector>> means = {group_means, group_means};
  return GroupClusterStats::from_table(frac, means, vec({0.0, 1.0, 0.1}));
}

/// Points and an assignment whose statistics reproduce appendix_stats().
struct PointFixture {
  Dataset dataset;
  Assignment assignment;
};

inline PointFixture appendix_points() {
  std::vector<std::vector<double>> pts;
  std::vector<int> group, cluster;
  auto add = [&](double x, double y, int g, int c) {
    pts.push_back({x, y});
    group.push_back(g);
    cluster.push_back(c);
  };
  // group 0: 10 points at the origin, 9 in cluster 0.
  for (int p = 0; p < 10; ++p) add(0, 0, 0, p < 9 ? 0 : 1);
  // group 1: 100 points around (2,2); 1 in cluster 0, 99 in cluster 1 with
  // within-cluster scatter 100 (base cost 1).
  add(2, 2, 1, 0);
  add(2, 2, 1, 1);
  const double s = std::sqrt(100.0 / 98.0);
  for (int p = 0; p < 49; ++p) {
    add(2 + s, 2, 1, 1);
    add(2 - s, 2, 1, 1);
  }
  // group 2: 20 points around (3,1); 19 in cluster 0 with scatter 2 (base 0.1).
  add(3, 1, 2, 1);
  add(3, 1, 2, 0);
  for (int p = 0; p < 9; ++p) {
    add(3 + 1.0 / 3.0, 1, 2, 0);
    add(3 - 1.0 / 3.0, 1, 2, 0);
  }
  RowMatrix m(static_cast<Index>(pts.size()), 2);
  for (std::size_t p = 0; p < pts.size(); ++p) m.row(static_cast<Index>(p)) << pts[p][0], pts[p][1];
  return {Dataset(std::move(m), std::move(group), 3), Assignment(std::move(cluster), 2)};
}

/// Random fixed-partition statistics. With `allow_absent`, some cells of
/// each group get zero mass (but every group keeps at least one cell).
inline GroupClusterStats random_stats(std::mt19937_64& rng, std::size_t k, std::size_t m,
                                      std::size_t d, bool allow_absent = true) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  Eigen::MatrixXd frac = Eigen::MatrixXd::Zero(static_cast<Index>(k), static_cast<Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double w = unit(rng) + 0.05;
      if (allow_absent && k > 1 && unit(rng) < 0.15) w = 0.0;
      frac(static_cast<Index>(i), static_cast<Index>(j)) = w;
      total += w;
    }
    if (total == 0.0) {
      frac(0, static_cast<Index>(j)) = 1.0;
      total = 1.0;
    }
    frac.col(static_cast<Index>(j)) /= total;
  }
  std::vector<std::vector<Vector>> means(k, std::vector<Vector>(m));
  for (auto& row : means) {
    for (auto& mu : row) {
      mu.resize(static_cast<Index>(d));
      for (Index s = 0; s < mu.size(); ++s) mu[s] = normal(rng);
    }
  }
  Vector base(static_cast<Index>(m));
  for (Index j = 0; j < base.size(); ++j) base[j] = 3.0 * unit(rng);
  return GroupClusterStats::from_table(frac, means, base);
}

/// Random points with groups and cluster labels in [0, k).
inline PointFixture random_points(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                  std::size_t m, std::size_t k) {
  std::normal_distribution<double> normal(0.0, 1.5);
  RowMatrix pts(static_cast<Index>(n), static_cast<Index>(d));
  for (Index r = 0; r < pts.rows(); ++r) {
    for (Index c = 0; c < pts.cols(); ++c) pts(r, c) = normal(rng);
  }
  std::vector<int> group(n), cluster(n);
  std::uniform_int_distribution<int> pick_group(0, static_cast<int>(m) - 1);
  std::uniform_int_distribution<int> pick_cluster(0, static_cast<int>(k) - 1);
  for (std::size_t p = 0; p < n; ++p) {
    group[p] = p < m ? static_cast<int>(p) : pick_group(rng);
    cluster[p] = pick_cluster(rng);
  }
  return {Dataset(std::move(pts), std::move(group), static_cast<int>(m)),
          Assignment(std::move(cluster), static_cast<int>(k))};
}

/// Point-level group average costs: sum over group members of the squared
/// distance to their cluster's center, divided by the group size.
inline Vector brute_group_costs(const Dataset& ds, const Assignment& asg, const RowMatrix& centers) {
  Vector cost = Vector::Zero(static_cast<Index>(ds.m()));
  for (std::size_t p = 0; p < ds.n(); ++p) {
    double dist = 0.0;
    for (std::size_t s = 0; s < ds.d(); ++s) {
      const double diff = ds.points()(static_cast<Index>(p), static_cast<Index>(s)) -
                          centers(asg.cluster_of[p], static_cast<Index>(s));
      dist += diff * diff;
    }
    cost[ds.group_of(p)] += dist;
  }
  for (std::size_t j = 0; j < ds.m(); ++j) {
    cost[static_cast<Index>(j)] /= static_cast<double>(ds.group_sizes()[j]);
  }
  return cost;
}

/// Group costs of a center set straight from the defining sum over cells.
inline Vector formula_costs(const GroupClusterStats& st, const RowMatrix& c) {
  Vector f = st.base_cost;
  for (std::size_t j = 0; j < st.m; ++j) {
    for (std::size_t i = 0; i < st.k; ++i) {
      const double a = st.frac(static_cast<Index>(i), static_cast<Index>(j));
      if (a > 0) f[static_cast<Index>(j)] += a * (c.row(static_cast<Index>(i)) - st.mean(i, j)).squaredNorm();
    }
  }
  return f;
}

/// Two-group costs along the gamma curve, computed from the explicit segment
/// parametrisation (independent of the library's center builders).
struct TwoGroupCurve {
  const GroupClusterStats& st;

  RowMatrix centers(double g) const {
    RowMatrix c = RowMatrix::Zero(static_cast<Index>(st.k), static_cast<Index>(st.d));
    for (std::size_t i = 0; i < st.k; ++i) {
      const double a = st.frac(static_cast<Index>(i), 0);
      const double b = st.frac(static_cast<Index>(i), 1);
      if (a > 0 && b > 0) {
        const double wa = g * a / (g * a + (1 - g) * b);
        c.row(static_cast<Index>(i)) = wa * st.mean(i, 0) + (1 - wa) * st.mean(i, 1);
      } else if (a > 0) {
        c.row(static_cast<Index>(i)) = st.mean(i, 0);
      } else if (b > 0) {
        c.row(static_cast<Index>(i)) = st.mean(i, 1);
      }
    }
    return c;
  }

  std::pair<double, double> costs(double g) const {
    const Vector f = formula_costs(st, centers(g));
    return {f[0], f[1]};
  }

  double worst(double g) const {
    const auto [fa, fb] = costs(g);
    return std::max(fa, fb);
  }

  /// max(f_A, f_B) is unimodal along the curve (one decreasing, one
  /// increasing), so ternary search converges to its minimum.
  double minimum() const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (worst(m1) <= worst(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    return std::min({worst(0.5 * (lo + hi)), worst(0.0), worst(1.0)});
  }
};

/// Distance from `point` to the convex hull of the rows of `vertices`, by
/// enumerating supports and solving the affine least-squares problem on each.
inline double hull_distance(const RowMatrix& vertices, const Eigen::RowVectorXd& point) {
  const auto n = static_cast<int>(vertices.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<Index> support;
    for (int v = 0; v < n; ++v) {
      if (mask & (1 << v)) support.push_back(v);
    }
    // Minimise ||sum_s w_s v_s - point|| with sum w = 1:
    // w = w0 + N t, where w0 = e_0 and N spans differences.
    const auto s = static_cast<Index>(support.size());
    Eigen::MatrixXd diffs(vertices.cols(), s - 1);
    for (Index a = 1; a < s; ++a) {
      diffs.col(a - 1) = (vertices.row(support[static_cast<std::size_t>(a)]) - vertices.row(support[0])).transpose();
    }
    const Vector rhs = (point - vertices.row(support[0])).transpose();
    Vector t = Vector::Zero(s - 1);
    if (s > 1) t = diffs.completeOrthogonalDecomposition().solve(rhs);
    Vector w(s);
    w[0] = 1.0 - t.sum();
    w.tail(s - 1) = t;
    if ((w.array() < -1e-12).any()) continue;
    Vector proj = vertices.row(support[0]).transpose();
    if (s > 1) proj += diffs * t;
    best = std::min(best, (proj - point.transpose()).norm());
  }
  return best;
}

/// Largest distance from any center to the hull of its present group means.
inline double max_hull_violation(const GroupClusterStats& st, const RowMatrix& centers) {
  double worst = 0.0;
  for (std::size_t i = 0; i < st.k; ++i) {
    std::vector<Index> present;
    for (std::size_t j = 0; j < st.m; ++j) {
      if (st.present(i, j)) present.push_back(static_cast<Index>(j));
    }
    if (present.empty()) continue;
    RowMatrix verts(static_cast<Index>(present.size()), static_cast<Index>(st.d));
    for (std::size_t a = 0; a < present.size(); ++a) {
      verts.row(static_cast<Index>(a)) = st.mean(i, static_cast<std::size_t>(present[a]));
    }
    worst = std::max(worst, hull_distance(verts, centers.row(static_cast<Index>(i))));
  }
  return worst;
}

}  // namespace fairkm::testing
