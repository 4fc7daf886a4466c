#include "fairkm/fair_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairkm/cost.hpp"
#include "fairkm/errors.hpp"
#include "fairkm/simplex.hpp"
#include "fairkm/summation.hpp"

namespace fairkm {

namespace {

using Index = Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();

Index ix(std::size_t v) { return static_cast<Index>(v); }

void check_gamma(const Vector& gamma, std::size_t m) {
  if (static_cast<std::size_t>(gamma.size()) != m) {
    throw std::invalid_argument("gamma has " + std::to_string(gamma.size()) + " entries, expected " +
                                std::to_string(m));
  }
  if ((gamma.array() < 0.0).any() || !gamma.allFinite()) {
    throw std::invalid_argument("gamma must be finite and non-negative");
  }
  if (std::abs(gamma.sum() - 1.0) > 1e-9) throw std::invalid_argument("gamma must sum to 1");
}

// Per-cluster weights over groups for a gamma on the simplex. A cluster whose
// gamma-weighted mass is zero either throws (strict) or falls back to the
// frac-weighted combination of its present groups; such a cluster does not
// enter sum_j gamma_j grad f_j, so any choice keeps the point stationary.
Eigen::MatrixXd z_weights(const Vector& gamma, const GroupClusterStats& stats, bool strict) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(ix(stats.k), ix(stats.m));
  for (std::size_t i = 0; i < stats.k; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < stats.m; ++j) {
      if (stats.present(i, j)) denom += gamma[ix(j)] * stats.frac(ix(i), ix(j));
    }
    if (denom > 0.0) {
      for (std::size_t j = 0; j < stats.m; ++j) {
        if (stats.present(i, j)) w(ix(i), ix(j)) = gamma[ix(j)] * stats.frac(ix(i), ix(j)) / denom;
      }
      continue;
    }
    if (strict) throw DegenerateClusterError(i);
    double mass = 0.0;
    for (std::size_t j = 0; j < stats.m; ++j) mass += stats.frac(ix(i), ix(j));
    if (mass > 0.0) {
      for (std::size_t j = 0; j < stats.m; ++j) {
        if (stats.present(i, j)) w(ix(i), ix(j)) = stats.frac(ix(i), ix(j)) / mass;
      }
    }
    // A cluster with no points keeps an all-zero row: its center is the origin
    // and affects no group cost.
  }
  return w;
}

RowMatrix centers_from_weights(const Eigen::MatrixXd& w, const GroupClusterStats& stats) {
  RowMatrix c = RowMatrix::Zero(ix(stats.k), ix(stats.d));
  for (std::size_t i = 0; i < stats.k; ++i) {
    for (std::size_t j = 0; j < stats.m; ++j) {
      const double wij = w(ix(i), ix(j));
      if (wij != 0.0) c.row(ix(i)) += wij * stats.mean(i, j);
    }
  }
  return c;
}

Vector costs_at(const RowMatrix& c, const GroupClusterStats& stats) {
  Vector f(ix(stats.m));
  for (std::size_t j = 0; j < stats.m; ++j) {
    CompensatedSum total;
    total.add(stats.base_cost[ix(j)]);
    for (std::size_t i = 0; i < stats.k; ++i) {
      if (!stats.present(i, j)) continue;
      total.add(stats.frac(ix(i), ix(j)) * (c.row(ix(i)) - stats.mean(i, j)).squaredNorm());
    }
    f[ix(j)] = total.value();
  }
  return f;
}

FairSolveReport make_report(RowMatrix centers, Vector gamma, const GroupClusterStats& stats,
                            double lower_bound, int iterations) {
  FairSolveReport report;
  report.centers = CenterSet(std::move(centers));
  report.gamma = std::move(gamma);
  report.group_costs = costs_at(report.centers.matrix(), stats);
  report.objective = report.group_costs.maxCoeff();
  report.lower_bound = std::min(lower_bound, report.objective);
  report.certificate_gap = report.objective - report.lower_bound;
  report.iterations = iterations;
  return report;
}

// ---------------------------------------------------------------------------
// Two-group segment model: everything the bisection needs in O(k).

struct SegmentModel {
  std::vector<double> alpha, beta, length;
  std::vector<bool> both_present;
  double base_a = 0.0, base_b = 0.0;

  explicit SegmentModel(const GroupClusterStats& stats) {
    const std::size_t k = stats.k;
    alpha.resize(k);
    beta.resize(k);
    length.resize(k);
    both_present.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      alpha[i] = stats.frac(ix(i), 0);
      beta[i] = stats.frac(ix(i), 1);
      both_present[i] = stats.present(i, 0) && stats.present(i, 1);
      length[i] = stats.segment_length(i);
    }
    base_a = stats.base_cost[0];
    base_b = stats.base_cost[1];
  }

  double x(std::size_t i, double gamma) const {
    if (!both_present[i] || length[i] == 0.0) return 0.0;
    const double denom = gamma * alpha[i] + (1.0 - gamma) * beta[i];
    return (1.0 - gamma) * beta[i] * length[i] / denom;
  }

  std::pair<double, double> costs(double gamma) const {
    CompensatedSum fa, fb;
    fa.add(base_a);
    fb.add(base_b);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (!both_present[i]) continue;
      const double xi = x(i, gamma);
      const double rest = length[i] - xi;
      fa.add(alpha[i] * xi * xi);
      fb.add(beta[i] * rest * rest);
    }
    return {fa.value(), fb.value()};
  }
};

RowMatrix segment_centers(double gamma, const SegmentModel& model, const GroupClusterStats& stats) {
  RowMatrix c = RowMatrix::Zero(ix(stats.k), ix(stats.d));
  for (std::size_t i = 0; i < stats.k; ++i) {
    const bool has_a = stats.present(i, 0);
    const bool has_b = stats.present(i, 1);
    if (has_a && has_b) {
      const double l = model.length[i];
      if (l == 0.0) {
        c.row(ix(i)) = stats.mean(i, 0);
      } else {
        const double xi = model.x(i, gamma);
        c.row(ix(i)) = ((l - xi) * stats.mean(i, 0) + xi * stats.mean(i, 1)) / l;
      }
    } else if (has_a) {
      c.row(ix(i)) = stats.mean(i, 0);
    } else if (has_b) {
      c.row(ix(i)) = stats.mean(i, 1);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// MWU over gamma, optionally restricted to a group subset.

struct MwuRun {
  Vector best_gamma;
  RowMatrix best_centers;
  double best_objective = kInf;
  double lower_bound = -kInf;  // max over iterates of min_{j in S} f_j
  int iterations = 0;
};

MwuRun run_mwu(const GroupClusterStats& stats, const std::vector<bool>& in_subset, int rounds) {
  const std::size_t m = stats.m;
  const auto subset_size =
      static_cast<double>(std::count(in_subset.begin(), in_subset.end(), true));
  Vector gamma = Vector::Zero(ix(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (in_subset[j]) gamma[ix(j)] = 1.0 / subset_size;
  }

  MwuRun run;
  Vector gaps(ix(m));
  for (int t = 1; t <= rounds; ++t) {
    run.iterations = t;
    const RowMatrix centers = centers_from_weights(z_weights(gamma, stats, false), stats);
    const Vector f = costs_at(centers, stats);
    double worst = -kInf;
    double least = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_subset[j]) continue;
      worst = std::max(worst, f[ix(j)]);
      least = std::min(least, f[ix(j)]);
    }
    run.lower_bound = std::max(run.lower_bound, least);
    if (worst < run.best_objective) {
      // The objective is over all groups even when the search is restricted.
      const double full = f.maxCoeff();
      if (full < run.best_objective) {
        run.best_objective = full;
        run.best_gamma = gamma;
        run.best_centers = centers;
      }
    }
    double max_gap = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      gaps[ix(j)] = in_subset[j] ? worst - f[ix(j)] : 0.0;
      max_gap = std::max(max_gap, gaps[ix(j)]);
    }
    if (max_gap == 0.0) break;  // equalized over the subset: stationary point
    const double damping = std::sqrt(static_cast<double>(t + 1)) * max_gap;
    for (std::size_t j = 0; j < m; ++j) {
      if (in_subset[j]) gamma[ix(j)] *= 1.0 - gaps[ix(j)] / damping;
    }
    gamma /= gamma.sum();
  }
  return run;
}

// ---------------------------------------------------------------------------
// Convex oracle over per-cluster simplex weights w (k x m, absent cells 0).

class HullModel {
 public:
  explicit HullModel(const GroupClusterStats& stats) : stats_(stats) {
    const std::size_t k = stats.k;
    present_.resize(k);
    reference_ = RowMatrix::Zero(ix(k), ix(stats.d));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < stats.m; ++j) {
        if (stats.present(i, j)) present_[i].push_back(j);
      }
      if (!present_[i].empty()) {
        for (std::size_t j : present_[i]) reference_.row(ix(i)) += stats.mean(i, j);
        reference_.row(ix(i)) /= static_cast<double>(present_[i].size());
      }
    }
  }

  const std::vector<std::size_t>& present(std::size_t i) const { return present_[i]; }

  RowMatrix centers(const Eigen::MatrixXd& w) const { return centers_from_weights(w, stats_); }

  Vector costs(const RowMatrix& c) const { return costs_at(c, stats_); }

  // Gradient of sum_j coeff_j f_j with respect to w. Means are taken
  // relative to the per-cluster reference point: that shifts each cluster's
  // block by a multiple of the all-ones vector, which simplex projections and
  // feasible directions do not see.
  Eigen::MatrixXd weight_gradient(const RowMatrix& c, const Vector& coeff) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ix(stats_.k), ix(stats_.m));
    Vector center_grad(ix(stats_.d));
    for (std::size_t i = 0; i < stats_.k; ++i) {
      if (present_[i].empty()) continue;
      center_grad.setZero();
      for (std::size_t j : present_[i]) {
        if (coeff[ix(j)] == 0.0) continue;
        center_grad += (2.0 * coeff[ix(j)] * stats_.frac(ix(i), ix(j))) *
                       (c.row(ix(i)) - stats_.mean(i, j)).transpose();
      }
      for (std::size_t l : present_[i]) {
        g(ix(i), ix(l)) = center_grad.dot((stats_.mean(i, l) - reference_.row(ix(i))).transpose());
      }
    }
    return g;
  }

  void project(Eigen::MatrixXd& w) const {
    std::vector<double> block;
    for (std::size_t i = 0; i < stats_.k; ++i) {
      if (present_[i].empty()) continue;
      block.clear();
      for (std::size_t j : present_[i]) block.push_back(w(ix(i), ix(j)));
      project_to_simplex(block);
      w.row(ix(i)).setZero();
      for (std::size_t a = 0; a < present_[i].size(); ++a) w(ix(i), ix(present_[i][a])) = block[a];
    }
  }

  Eigen::MatrixXd uniform_weights() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(ix(stats_.k), ix(stats_.m));
    for (std::size_t i = 0; i < stats_.k; ++i) {
      for (std::size_t j : present_[i]) {
        w(ix(i), ix(j)) = 1.0 / static_cast<double>(present_[i].size());
      }
    }
    return w;
  }

 private:
  const GroupClusterStats& stats_;
  std::vector<std::vector<std::size_t>> present_;
  RowMatrix reference_;
};

struct Incumbent {
  Eigen::MatrixXd weights;
  double objective = kInf;

  void offer(const Eigen::MatrixXd& w, double value) {
    if (value < objective) {
      objective = value;
      weights = w;
    }
  }
};

// Smallest-index active group: a deterministic subgradient choice.
std::size_t argmax_first(const Vector& f) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < static_cast<std::size_t>(f.size()); ++j) {
    if (f[ix(j)] > f[ix(best)]) best = j;
  }
  return best;
}

int projected_subgradient_phase(const HullModel& model, Eigen::MatrixXd w, int steps,
                                Incumbent& best) {
  const auto m = best.weights.cols();
  int taken = 0;
  for (int t = 1; t <= steps; ++t) {
    taken = t;
    const RowMatrix c = model.centers(w);
    const Vector f = model.costs(c);
    best.offer(w, f.maxCoeff());
    Vector coeff = Vector::Zero(m);
    coeff[ix(argmax_first(f))] = 1.0;
    const Eigen::MatrixXd g = model.weight_gradient(c, coeff);
    const double norm = g.norm();
    if (norm == 0.0) break;  // the active group sits at its own means
    w -= (1.0 / std::sqrt(static_cast<double>(t))) * (g / norm);
    model.project(w);
  }
  return taken;
}

// Augmented Lagrangian for   min theta  s.t.  f_j(w) <= theta,  w in product of simplices,
// with accelerated projected-gradient inner solves. The multipliers converge
// to the optimal group weights.
struct AlmResult {
  Vector multipliers;
  int iterations = 0;
};

AlmResult augmented_lagrangian_phase(const HullModel& model, std::size_t m, Incumbent& best) {
  constexpr int kOuter = 20;
  constexpr int kInner = 300;

  Eigen::MatrixXd w = best.weights;
  double theta = best.objective;
  const double scale = std::max(std::abs(best.objective), 1e-12);
  double rho = 10.0 / scale;
  const double rho_max = 1e6 / scale;
  Vector lambda = Vector::Constant(ix(m), 1.0 / static_cast<double>(m));
  double lipschitz = 1.0;
  int iterations = 0;
  double previous_violation = kInf;
  const double inner_tolerance = 1e-11 * std::max(1.0, scale);

  struct Eval {
    double value;
    Eigen::MatrixXd grad_w;
    double grad_theta;
    double objective;
  };
  auto evaluate = [&](const Eigen::MatrixXd& wv, double th) {
    const RowMatrix c = model.centers(wv);
    const Vector f = model.costs(c);
    const Vector shifted = (lambda.array() + rho * (f.array() - th)).max(0.0).matrix();
    Eval e;
    e.value = th + (shifted.squaredNorm() - lambda.squaredNorm()) / (2.0 * rho);
    e.grad_w = model.weight_gradient(c, shifted);
    e.grad_theta = 1.0 - shifted.sum();
    e.objective = f.maxCoeff();
    return e;
  };

  for (int outer = 0; outer < kOuter; ++outer) {
    Eigen::MatrixXd x_w = w, y_w = w;
    double x_t = theta, y_t = theta;
    double momentum = 1.0;
    double previous = kInf;
    bool inner_converged = false;
    for (int inner = 0; inner < kInner; ++inner) {
      ++iterations;
      const Eval at_y = evaluate(y_w, y_t);
      Eigen::MatrixXd next_w;
      double next_t = 0.0;
      Eval at_next;
      double step_sq = 0.0;
      while (true) {
        next_w = y_w - at_y.grad_w / lipschitz;
        model.project(next_w);
        next_t = y_t - at_y.grad_theta / lipschitz;
        at_next = evaluate(next_w, next_t);
        const Eigen::MatrixXd dw = next_w - y_w;
        const double dt = next_t - y_t;
        step_sq = dw.squaredNorm() + dt * dt;
        const double model_value = at_y.value + (at_y.grad_w.array() * dw.array()).sum() +
                                   at_y.grad_theta * dt + 0.5 * lipschitz * step_sq;
        if (at_next.value <= model_value + 1e-15 * std::abs(at_y.value)) break;
        lipschitz *= 2.0;
        if (!std::isfinite(lipschitz)) break;
      }
      best.offer(next_w, at_next.objective);

      const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      if (at_next.value > previous) {
        momentum = 1.0;  // adaptive restart
        y_w = next_w;
        y_t = next_t;
      } else {
        const double beta = (momentum - 1.0) / momentum_next;
        y_w = next_w + beta * (next_w - x_w);
        y_t = next_t + beta * (next_t - x_t);
        momentum = momentum_next;
      }
      x_w = std::move(next_w);
      x_t = next_t;
      previous = at_next.value;
      lipschitz *= 0.9;
      // Gradient-mapping norm; a tiny step alone can just mean a large L.
      if (lipschitz * lipschitz * step_sq <= inner_tolerance * inner_tolerance || step_sq < 1e-30) {
        inner_converged = true;
        break;
      }
    }
    w = x_w;
    theta = x_t;
    const Vector f = model.costs(model.centers(w));
    best.offer(w, f.maxCoeff());
    lambda = (lambda.array() + rho * (f.array() - theta)).max(0.0).matrix();
    const double violation = std::max((f.array() - theta).maxCoeff(), 0.0);
    // Stop only once the subproblem itself was solved; an inexact inner solve
    // can look feasible with normalized multipliers while still suboptimal.
    if (inner_converged && violation <= 1e-13 * scale && std::abs(lambda.sum() - 1.0) <= 1e-10) break;
    // Raise the penalty only when feasibility stalls; a needlessly large one
    // makes the inner problem ill-conditioned.
    if (violation > 0.25 * previous_violation) rho = std::min(2.0 * rho, rho_max);
    previous_violation = violation;
  }
  return {lambda, iterations};
}

struct PolishResult {
  RowMatrix centers;
  Vector multipliers;
};

// Log-barrier Newton method on the epigraph form
//   min theta  s.t.  f_j(C) <= theta,
// directly in center coordinates. Each f_j is a separable convex quadratic, so
// Newton steps are exact and the first-order result is refined to near machine
// precision. The barrier minimizer keeps every center in the hull of its
// present group means (its gradient condition makes c_i a positive
// combination of them). Multipliers are the barrier dual estimates 1/(t s_j).
PolishResult barrier_polish(const GroupClusterStats& stats, RowMatrix c) {
  const std::size_t m = stats.m;
  const Index d = ix(stats.d);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < stats.k; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (stats.present(i, j)) {
        active.push_back(i);
        break;
      }
    }
  }
  const Index n = static_cast<Index>(active.size()) * d + 1;
  const Index theta_at = n - 1;

  Vector f = costs_at(c, stats);
  const double scale = std::max(f.maxCoeff(), 1e-12);
  double theta = f.maxCoeff() + 1e-3 * scale;
  double t = static_cast<double>(m) / (1e-3 * scale);

  auto barrier = [&](const Vector& fv, double th, double& value) {
    value = t * th;
    for (Index j = 0; j < fv.size(); ++j) {
      const double slack = th - fv[j];
      if (!(slack > 0.0)) return false;
      value -= std::log(slack);
    }
    return true;
  };

  Vector grad(n), a(n), step(n);
  Eigen::MatrixXd hess(n, n);
  for (int stage = 0; stage < 40; ++stage) {
    for (int newton = 0; newton < 100; ++newton) {
      f = costs_at(c, stats);
      double value = 0.0;
      if (!barrier(f, theta, value)) break;
      grad.setZero();
      hess.setZero();
      grad[theta_at] = t;
      for (std::size_t j = 0; j < m; ++j) {
        const double slack = theta - f[ix(j)];
        a.setZero();
        a[theta_at] = -1.0;
        for (std::size_t p = 0; p < active.size(); ++p) {
          const std::size_t i = active[p];
          const double alpha = stats.frac(ix(i), ix(j));
          if (alpha <= 0.0) continue;
          a.segment(static_cast<Index>(p) * d, d) =
              (2.0 * alpha) * (c.row(ix(i)) - stats.mean(i, j)).transpose();
          hess.diagonal().segment(static_cast<Index>(p) * d, d).array() += 2.0 * alpha / slack;
        }
        grad += a / slack;
        hess.noalias() += (a / (slack * slack)) * a.transpose();
      }
      step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement) || decrement <= 2e-14) break;

      double size = 1.0;
      bool moved = false;
      while (size > 1e-12) {
        RowMatrix trial = c;
        for (std::size_t p = 0; p < active.size(); ++p) {
          trial.row(ix(active[p])) += size * step.segment(static_cast<Index>(p) * d, d).transpose();
        }
        const double trial_theta = theta + size * step[theta_at];
        double trial_value = 0.0;
        if (barrier(costs_at(trial, stats), trial_theta, trial_value) &&
            trial_value <= value - 0.25 * size * decrement) {
          c = std::move(trial);
          theta = trial_theta;
          moved = true;
          break;
        }
        size *= 0.5;
      }
      if (!moved) break;
    }
    if (static_cast<double>(m) / t <= 1e-13 * scale) break;
    t *= 10.0;
  }

  f = costs_at(c, stats);
  Vector multipliers(ix(m));
  for (std::size_t j = 0; j < m; ++j) {
    multipliers[ix(j)] = 1.0 / (t * std::max(theta - f[ix(j)], 1e-300));
  }
  return {std::move(c), std::move(multipliers)};
}

// Weak-duality bound: for any gamma on the simplex,
//   min_C sum_j gamma_j f_j(C) <= optimum,
// and the unconstrained minimizer is the gamma-parametrized center set.
double dual_bound(const Vector& gamma, const GroupClusterStats& stats) {
  const RowMatrix c = centers_from_weights(z_weights(gamma, stats, false), stats);
  return gamma.dot(costs_at(c, stats));
}

}  // namespace

std::string_view to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::line_search:
      return "line_search";
    case SolverMode::mwu:
      return "mwu";
    case SolverMode::subgradient:
      return "subgradient";
  }
  return "unknown";
}

SolverConfig SolverConfig::defaults(SolverMode mode) {
  SolverConfig config;
  config.mode = mode;
  switch (mode) {
    case SolverMode::line_search:
      config.max_iterations = 64;
      break;
    case SolverMode::mwu:
      config.max_iterations = 5000;
      break;
    case SolverMode::subgradient:
      config.max_iterations = 2000;
      break;
  }
  return config;
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (!(equal_cost_tolerance > 0.0)) {
    throw std::invalid_argument("SolverConfig: equal_cost_tolerance must be > 0");
  }
}

std::vector<double> x_from_gamma(double gamma, const GroupClusterStats& stats) {
  if (stats.m != 2) throw UnsupportedModeError("x_from_gamma requires exactly two groups");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("x_from_gamma: gamma outside [0,1]");
  const SegmentModel model(stats);
  std::vector<double> x(stats.k);
  for (std::size_t i = 0; i < stats.k; ++i) x[i] = model.x(i, gamma);
  return x;
}

CenterSet centers_from_gamma(const Vector& gamma, const GroupClusterStats& stats) {
  check_gamma(gamma, stats.m);
  return CenterSet(centers_from_weights(z_weights(gamma, stats, true), stats));
}

Eigen::MatrixXd weights_from_gamma(const Vector& gamma, const GroupClusterStats& stats) {
  check_gamma(gamma, stats.m);
  return z_weights(gamma, stats, false);
}

double stationarity_residual(const Vector& gamma, const CenterSet& centers,
                             const GroupClusterStats& stats) {
  if (static_cast<std::size_t>(gamma.size()) != stats.m) {
    throw std::invalid_argument("stationarity_residual: gamma size != m");
  }
  RowMatrix combined = RowMatrix::Zero(ix(stats.k), ix(stats.d));
  for (std::size_t j = 0; j < stats.m; ++j) {
    if (gamma[ix(j)] == 0.0) continue;
    combined += gamma[ix(j)] * group_cost_gradient(centers, stats, j);
  }
  return combined.norm();
}

double min_stationarity_residual(const CenterSet& centers, const GroupClusterStats& stats,
                                 std::span<const std::size_t> subset) {
  std::vector<std::size_t> groups(subset.begin(), subset.end());
  if (groups.empty()) {
    groups.resize(stats.m);
    std::iota(groups.begin(), groups.end(), 0);
  }
  Eigen::MatrixXd generators(ix(stats.k * stats.d), ix(groups.size()));
  for (std::size_t a = 0; a < groups.size(); ++a) {
    if (groups[a] >= stats.m) throw std::invalid_argument("subset contains a group outside [0, m)");
    const RowMatrix g = group_cost_gradient(centers, stats, groups[a]);
    generators.col(ix(a)) = Eigen::Map<const Vector>(g.data(), g.size());
  }
  return min_norm_in_hull(generators).norm;
}

FairSolveReport line_search_2groups(const GroupClusterStats& stats, const SolverConfig& config) {
  if (stats.m != 2) throw UnsupportedModeError("line search requires exactly two groups");
  config.validate();
  const SegmentModel model(stats);

  auto finish = [&](double gamma, double lower_bound, int iterations) {
    Vector g(2);
    g << gamma, 1.0 - gamma;
    return make_report(segment_centers(gamma, model, stats), std::move(g), stats, lower_bound,
                       iterations);
  };

  // f_A decreases and f_B increases in gamma. If one group dominates at its
  // own end of the curve, that endpoint is optimal and its cost is certified
  // by the single-group subset.
  const auto [fa_at_a, fb_at_a] = model.costs(1.0);
  if (fa_at_a >= fb_at_a) return finish(1.0, fa_at_a, 0);
  const auto [fa_at_b, fb_at_b] = model.costs(0.0);
  if (fb_at_b >= fa_at_b) return finish(0.0, fb_at_b, 0);

  double gamma = 0.5;
  double best_gamma = gamma;
  double best_value = kInf;
  double best_lower = -kInf;
  int iterations = 0;
  for (int t = 1; t <= config.max_iterations; ++t) {
    iterations = t;
    const auto [fa, fb] = model.costs(gamma);
    const double worst = std::max(fa, fb);
    if (worst < best_value) {
      best_value = worst;
      best_gamma = gamma;
      best_lower = std::min(fa, fb);
    }
    if (std::abs(fa - fb) <= config.equal_cost_tolerance * std::max({fa, fb, 1.0})) break;
    const double step = std::ldexp(1.0, -(t + 1));
    gamma += fa > fb ? step : -step;
  }
  return finish(best_gamma, best_lower, iterations);
}

FairSolveReport solve_mwu(const GroupClusterStats& stats, const SolverConfig& config) {
  config.validate();
  stats.validate();
  const std::size_t m = stats.m;
  MwuRun main = run_mwu(stats, std::vector<bool>(m, true), config.max_iterations);
  double lower = main.lower_bound;

  // Certificate over nested active sets: rank groups by cost at the best
  // iterate and run the search restricted to each top-r prefix. Every iterate
  // of a restricted run lies on Z_S, so min_{j in S} f_j there is a valid bound.
  const Vector f = costs_at(main.best_centers, stats);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f[ix(a)] > f[ix(b)]; });
  std::vector<bool> in_subset(m, false);
  for (std::size_t r = 1; r < m; ++r) {
    if (main.best_objective - lower <= 1e-12 * std::max(main.best_objective, 1.0)) break;
    in_subset[order[r - 1]] = true;
    const MwuRun restricted = run_mwu(stats, in_subset, config.max_iterations);
    lower = std::max(lower, restricted.lower_bound);
  }
  return make_report(std::move(main.best_centers), std::move(main.best_gamma), stats, lower,
                     main.iterations);
}

FairSolveReport solve_subgradient(const GroupClusterStats& stats, const SolverConfig& config,
                                  const std::optional<Eigen::MatrixXd>& warm_weights) {
  config.validate();
  stats.validate();
  const HullModel model(stats);

  Eigen::MatrixXd start = model.uniform_weights();
  if (warm_weights) {
    if (warm_weights->rows() != ix(stats.k) || warm_weights->cols() != ix(stats.m)) {
      throw std::invalid_argument("solve_subgradient: warm start must be k x m");
    }
    start = *warm_weights;
    for (std::size_t i = 0; i < stats.k; ++i) {
      for (std::size_t j = 0; j < stats.m; ++j) {
        if (!stats.present(i, j)) start(ix(i), ix(j)) = 0.0;
      }
    }
    model.project(start);
  }

  Incumbent best;
  best.weights = start;
  best.objective = model.costs(model.centers(start)).maxCoeff();

  int iterations = projected_subgradient_phase(model, start, config.max_iterations, best);
  const AlmResult alm = augmented_lagrangian_phase(model, stats.m, best);
  iterations += alm.iterations;

  RowMatrix centers = model.centers(best.weights);
  Vector gamma = alm.multipliers;
  PolishResult polished = barrier_polish(stats, centers);
  if (costs_at(polished.centers, stats).maxCoeff() < best.objective) {
    centers = std::move(polished.centers);
    gamma = std::move(polished.multipliers);
  }
  const double mass = gamma.sum();
  if (mass > 0.0) {
    gamma /= mass;
  } else {
    gamma = Vector::Constant(ix(stats.m), 1.0 / static_cast<double>(stats.m));
  }
  return make_report(std::move(centers), gamma, stats, dual_bound(gamma, stats),
                     iterations);
}

double certificate_lower_bound(const CenterSet& centers, const GroupClusterStats& stats,
                               std::span<const std::size_t> subset) {
  std::vector<std::size_t> groups(subset.begin(), subset.end());
  if (groups.empty()) {
    groups.resize(stats.m);
    std::iota(groups.begin(), groups.end(), 0);
  }
  const double residual = min_stationarity_residual(centers, stats, groups);
  if (residual > 1e-6) {
    throw InvalidCertificateError("centers are not stationary on Z_S (residual " +
                                  std::to_string(residual) + "); bound would be unsound");
  }
  double lower = kInf;
  for (std::size_t j : groups) lower = std::min(lower, group_cost(centers, stats, j));
  return lower;
}

FairSolveReport solve_fair_centers(const GroupClusterStats& stats, const SolverConfig& config) {
  switch (config.mode) {
    case SolverMode::line_search:
      return line_search_2groups(stats, config);
    case SolverMode::mwu:
      return solve_mwu(stats, config);
    case SolverMode::subgradient:
      return solve_subgradient(stats, config);
  }
  throw std::invalid_argument("unknown solver mode");
}

}  // namespace fairkm
