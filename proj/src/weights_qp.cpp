#include "amoo/weights_qp.hpp"

#include <algorithm>
#include <cmath>

namespace amoo {

GramResult gram_matrix(const ObjectiveSet& f, const Point& x) {
  const int m = f.size();
  GramResult r;
  r.gradients.resize(x.size(), m);
  for (int i = 0; i < m; ++i) {
    const Point g = f.objectives[i].gradient(x);
    if (!g.allFinite()) {
      throw NumericError("non-finite gradient for '" + f.objectives[i].name +
                         "'");
    }
    r.gradients.col(i) = g;
  }
  r.gram = r.gradients.transpose() * r.gradients;
  return r;
}

double qp_objective(const WeightSubproblem& p, const WeightVector& w) {
  return 2.0 * w.dot(p.delta) - w.dot(p.gram * w);
}

namespace {

// Largest eigenvalue of a PSD matrix by power iteration from a fixed
// deterministic start, floored away from zero.
double power_iteration_lambda_max(const Matrix& g) {
  const int m = static_cast<int>(g.rows());
  Point v = Point::Ones(m) / std::sqrt(static_cast<double>(m));
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    Point u = g * v;
    const double norm = u.norm();
    if (norm <= 1e-300) break;
    v = u / norm;
    lambda = norm;
  }
  return std::max(lambda, 1e-12);
}

}  // namespace

QpSolution solve_nonneg_qp(const WeightSubproblem& p, double tol,
                           int max_iters, const std::vector<int>* support) {
  const int m = static_cast<int>(p.delta.size());
  if (p.gram.rows() != m || p.gram.cols() != m) {
    throw UsageError("gram/delta size mismatch in weight subproblem");
  }
  if (tol <= 0) throw UsageError("qp tolerance must be positive");

  std::vector<int> keep;
  QpSolution sol;
  sol.w = WeightVector::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (support != nullptr &&
        std::find(support->begin(), support->end(), i) == support->end()) {
      continue;
    }
    // Zero gradient with positive gap would make the QP unbounded along e_i;
    // drop the index for this step (possible at a kink with subgradient 0).
    if (p.gram(i, i) <= 1e-14 && p.delta[i] > 1e-10) {
      sol.dropped_indices.push_back(i);
      continue;
    }
    keep.push_back(i);
  }
  const int mk = static_cast<int>(keep.size());
  if (mk == 0) {
    if (sol.dropped_indices.empty() && p.delta.size() > 0 &&
        p.delta.maxCoeff() > 1e-10 && p.gram.cwiseAbs().maxCoeff() <= 1e-14) {
      throw NumericError("weight subproblem is unbounded: zero gram with positive gaps");
    }
    sol.value = 0.0;
    return sol;
  }

  Point delta(mk);
  Matrix gram(mk, mk);
  for (int a = 0; a < mk; ++a) {
    delta[a] = p.delta[keep[a]];
    for (int b = 0; b < mk; ++b) gram(a, b) = p.gram(keep[a], keep[b]);
  }

  const double step = 1.0 / power_iteration_lambda_max(gram);
  Point w = Point::Zero(mk);
  Point best_w = w;
  double best_value = 0.0;
  sol.converged = false;
  for (int it = 0; it < max_iters; ++it) {
    const Point half_grad = delta - gram * w;  // gradient of the objective / 2
    double pg_norm = 0.0;
    for (int a = 0; a < mk; ++a) {
      const double g2 = 2.0 * half_grad[a];
      if (w[a] > 0.0 || g2 > 0.0) pg_norm = std::max(pg_norm, std::abs(g2));
    }
    if (pg_norm <= tol) {
      sol.converged = true;
      break;
    }
    w = (w + step * half_grad).cwiseMax(0.0);
    const double value = 2.0 * w.dot(delta) - w.dot(gram * w);
    if (value > best_value) {
      best_value = value;
      best_w = w;
    }
  }
  if (sol.converged) {
    best_w = w;
    best_value = 2.0 * w.dot(delta) - w.dot(gram * w);
  }

  for (int a = 0; a < mk; ++a) sol.w[keep[a]] = std::max(best_w[a], 0.0);
  sol.value = best_value;
  return sol;
}

QpOracleResult brute_force_qp_oracle(const WeightSubproblem& p,
                                     double grid_max, int grid_steps) {
  const int m = static_cast<int>(p.delta.size());
  if (m > 3) throw UsageError("qp oracle grid is exponential; m <= 3 only");
  if (grid_steps < 2 || grid_max <= 0) {
    throw UsageError("qp oracle needs grid_steps >= 2 and grid_max > 0");
  }

  Eigen::ArrayXd axis(grid_steps);
  for (int i = 0; i < grid_steps; ++i) {
    axis[i] = grid_max * static_cast<double>(i) / (grid_steps - 1);
  }

  QpOracleResult r;
  r.best_w = WeightVector::Zero(m);
  r.best_value = 0.0;

  if (m == 1) {
    const Eigen::ArrayXd vals =
        2.0 * p.delta[0] * axis - p.gram(0, 0) * axis.square();
    int idx = 0;
    r.best_value = vals.maxCoeff(&idx);
    r.best_w[0] = axis[idx];
    return r;
  }

  // Innermost axis is evaluated vectorized: value = base + lin - slope * axis
  // with lin precomputed once per call.
  const int last = m - 1;
  const Eigen::ArrayXd lin =
      2.0 * p.delta[last] * axis - p.gram(last, last) * axis.square();

  auto consider = [&](double base, double slope, const WeightVector& partial) {
    const Eigen::ArrayXd vals = base + lin - slope * axis;
    int idx = 0;
    const double v = vals.maxCoeff(&idx);
    if (v > r.best_value) {
      r.best_value = v;
      r.best_w = partial;
      r.best_w[last] = axis[idx];
    }
  };

  WeightVector w = WeightVector::Zero(m);
  if (m == 2) {
    for (int i = 0; i < grid_steps; ++i) {
      w[0] = axis[i];
      const double base = 2.0 * p.delta[0] * w[0] - p.gram(0, 0) * w[0] * w[0];
      consider(base, 2.0 * p.gram(0, 1) * w[0], w);
    }
    return r;
  }

  for (int i = 0; i < grid_steps; ++i) {
    w[0] = axis[i];
    const double base0 = 2.0 * p.delta[0] * w[0] - p.gram(0, 0) * w[0] * w[0];
    for (int j = 0; j < grid_steps; ++j) {
      w[1] = axis[j];
      const double base =
          base0 + 2.0 * p.delta[1] * w[1] - p.gram(1, 1) * w[1] * w[1] -
          2.0 * p.gram(0, 1) * w[0] * w[1];
      consider(base, 2.0 * (p.gram(0, 2) * w[0] + p.gram(1, 2) * w[1]), w);
    }
  }
  return r;
}

}  // namespace amoo
