#ifndef AMOO_CORE_HPP
#define AMOO_CORE_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core types for aligned multi-objective optimization: objective sets with
// known optimal values, the maximum-gap metric, and run trajectories.
//
// All types are immutable after construction and all operations are pure;
// objective value/gradient callbacks must themselves be pure and re-entrant
// (this is a contract on problem authors). Shared ObjectiveSets may be read
// from multiple threads without synchronization.

namespace amoo {

using Point = Eigen::VectorXd;
using WeightVector = Eigen::VectorXd;

// Absorbs floating-point noise in gap-nonnegativity checks (e.g. when x sits
// exactly on a kink of |.|).
inline constexpr double kEvalTolerance = 1e-9;

// Problem/setup mistakes: bad dimensions, invalid parameters, bad config keys.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse: empty trajectory, mismatched lengths, out-of-range requests.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numeric failures: non-finite values, divergence, Polyak stalls.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A single convex objective with known optimal value f*. Lipschitz and
// smoothness constants are attached when the problem family knows them.
struct Objective {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  double optimal_value = 0.0;
  std::optional<double> lipschitz_bound;    // G:  ||grad f(x)|| <= G
  std::optional<double> smoothness_bound;   // beta:  ||grad f||^2 <= 2 beta (f - f*)
  std::string name;
};

// An ordered collection of objectives over a common R^n.
// alignment_epsilon = 0 means the objectives share an exact common minimizer;
// > 0 means the eps-approximate solution set C_eps is known to be non-empty.
struct ObjectiveSet {
  std::vector<Objective> objectives;
  int dimension = 0;
  double alignment_epsilon = 0.0;

  // Maps x to a point of the analytic solution set (C* for exact alignment,
  // a C_eps witness set otherwise). Set by the synthetic problem factories;
  // used for bound distances and OGD step-size defaults.
  std::function<Point(const Point&)> solution_projection;

  // min_x f_EW(x), when it differs from the mean of the f_i* (eps > 0).
  std::optional<double> ew_optimal_value;

  // Optional fused evaluators for families whose objectives share
  // intermediates (one network forward, one shared quadratic form). Summing
  // the functions is what keeps equal-weights cheap; runners use these when
  // present and fall back to the per-objective callbacks.
  std::function<Point(const Point&)> all_values;  // (f_1(x),...,f_m(x))
  std::function<Point(const Point&, const WeightVector&)> weighted_gradient;

  int size() const { return static_cast<int>(objectives.size()); }
};

// Iterates x_1..x_K of one optimization run plus per-step records.
// `final_point` holds x_{K+1} (or the point that triggered early stopping);
// it is excluded from the average, which the convergence theory is stated on.
struct Trajectory {
  std::vector<Point> iterates;
  Point final_point;
  std::vector<WeightVector> weights;
  std::vector<double> per_step_max_gap;
  std::vector<double> step_sizes;
  std::vector<int> selected_indices;
  bool stopped_early = false;
  int stop_index = -1;  // 1-based step at which the stopping condition fired
  bool qp_converged = true;
  int qp_dropped_indices = 0;

  int steps() const { return static_cast<int>(iterates.size()); }
};

// MG(x) = max_i f_i(x) - f_i*.
double max_gap(const ObjectiveSet& f, const Point& x);

// Smallest index attaining the maximum gap (deterministic tie-break).
int select_max_gap_index(const ObjectiveSet& f, const Point& x);

// Coordinate-wise mean of all recorded iterates.
Point average_iterate(const Trajectory& traj);

// Mean of the first k iterates, 1 <= k <= steps().
Point prefix_average(const Trajectory& traj, int k);

// x in C_eps, i.e. f_i(x) - f_i* <= eps for all i. Equivalent to
// max_gap(f, x) <= eps.
bool is_in_epsilon_set(const ObjectiveSet& f, const Point& x, double eps);

// Gap of one objective with finiteness checks.
double objective_gap(const Objective& obj, const Point& x);

bool all_finite(const Point& x);

}  // namespace amoo

#endif
