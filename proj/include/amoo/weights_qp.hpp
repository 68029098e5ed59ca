#ifndef AMOO_WEIGHTS_QP_HPP
#define AMOO_WEIGHTS_QP_HPP

#include "amoo/core.hpp"

// Per-iteration weight subproblem
//   max_{w >= 0}  2 w^T delta - w^T G w,
// where delta holds the objective gaps and G = J^T J is the Gram matrix of
// the gradient columns. Solved by projected gradient ascent with a fixed
// 1/lambda_max step; a grid-search oracle backs the tests.

namespace amoo {

using Matrix = Eigen::MatrixXd;

struct WeightSubproblem {
  Point delta;  // length m
  Matrix gram;  // m x m, symmetric PSD up to noise
};

struct GramResult {
  Matrix gram;       // m x m
  Matrix gradients;  // n x m, column i = grad f_i(x)
};

// J^T J and the raw gradient columns at x. O(n m^2).
GramResult gram_matrix(const ObjectiveSet& f, const Point& x);

struct QpSolution {
  WeightVector w;
  double value = 0.0;  // 2 w^T delta - w^T G w at the returned w
  bool converged = true;
  // Indices removed by the zero-curvature guard (gram_ii ~ 0, delta_i > 0).
  std::vector<int> dropped_indices;
};

// Projected gradient ascent from w = 0, step 1/lambda_max(gram), stopping
// when the projected gradient falls below tol. Non-convergence returns the
// best iterate with `converged` cleared; the caller decides.
//
// `support` optionally restricts the solve to a subset of indices (weights
// outside it are fixed at zero); used by the eps-shifted PAMOO step so that
// clamped nonpositive gaps never acquire weight.
QpSolution solve_nonneg_qp(const WeightSubproblem& p, double tol = 1e-10,
                           int max_iters = 10000,
                           const std::vector<int>* support = nullptr);

struct QpOracleResult {
  WeightVector best_w;
  double best_value = 0.0;
};

// Exhaustive grid search over [0, grid_max]^m, grid_steps points per axis.
// Only for m <= 3; the grid is exponential in m.
QpOracleResult brute_force_qp_oracle(const WeightSubproblem& p,
                                     double grid_max, int grid_steps);

// Objective value 2 w^T delta - w^T G w.
double qp_objective(const WeightSubproblem& p, const WeightVector& w);

}  // namespace amoo

#endif
