#ifndef AMOO_ANALYSIS_HPP
#define AMOO_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "amoo/optimizers.hpp"

// Theoretical bound values, empirical-vs-bound verdicts, the equal-weights
// separation experiment, and wall-clock throughput comparison.

namespace amoo {

// Verdicts use a relative tolerance: the inequalities are mathematical
// facts, tolerance covers floating-point accumulation only.
inline constexpr double kBoundRelTolerance = 1e-6;

enum class BoundKind {
  PamooUpper,       // G d / sqrt(K) (+ eps)
  MgamooLipschitz,  // 1.5 G d / sqrt(K) (+ eps)
  Smooth,           // 2 beta d^2 / K (+ 2 eps)
  EwLower,          // sqrt(m-1)/3 G d / sqrt(K), proven for K <= m
};

const char* bound_kind_name(BoundKind k);

double pamoo_upper_bound(double lipschitz, double dist, int k, double eps = 0.0);
double mgamoo_lipschitz_bound(double lipschitz, double dist, int k,
                              double eps = 0.0);
double smooth_bound(double beta, double dist, int k, double eps = 0.0);

struct BoundCheck {
  int k = 0;
  double empirical = 0.0;  // MG of the average of the first k iterates
  double bound = 0.0;
  BoundKind kind = BoundKind::PamooUpper;
  bool is_upper = true;
  bool pass = false;
  double slack = 0.0;  // bound - empirical (upper) or empirical - bound (lower)
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const;
};

struct BoundConstants {
  std::optional<double> lipschitz;
  std::optional<double> smoothness;
  double dist = 0.0;      // ||x1 - projection onto the solution set||
  double epsilon = 0.0;
  int m = 0;              // needed by the lower bound
};

// Fills dist (and the G/beta constants where the objectives carry them)
// from the problem's analytic projection.
BoundConstants derive_constants(const ObjectiveSet& f, const Point& x1,
                                double epsilon);

// Evaluates MG(mean of first k iterates) on a logarithmic k-grid up to the
// trajectory length and compares against each requested bound. The lower
// bound is only asserted inside its proven range k <= m.
BoundReport check_run_against_bounds(const Trajectory& traj,
                                     const ObjectiveSet& f,
                                     const BoundConstants& constants,
                                     const std::vector<BoundKind>& kinds);

std::vector<int> log_grid(int K);

// Lemma bounding MG of the average by the mean selected gap:
// returns {MG(x_bar), (1/K) sum_k max-gap(x_k)}.
std::pair<double, double> average_gap_bound(const Trajectory& traj,
                                            const ObjectiveSet& f);

// Count of steps violating the per-step squared-distance descent property
//   ||x_{k+1}-x*||^2 <= ||x_k-x*||^2 - (gap_I - eps)^2 / ||grad f_I||^2
// beyond 1e-9; applies to weight-QP and max-gap Polyak runs.
int count_descent_violations(const Trajectory& traj, const ObjectiveSet& f,
                             const Point& x_star, double eps = 0.0,
                             double tol = 1e-9);

struct SeparationResult {
  double ew_mg = 0.0;
  double mgamoo_mg = 0.0;
  double ew_lower_bound = 0.0;
  double mgamoo_upper_bound = 0.0;
  bool separated = false;
};

// Runs equal-weights Polyak and max-gap Polyak on the same worst-case
// problem and start point. Requires K <= m (the lower bound's validity
// range); the separation is guaranteed once sqrt(m-1)/3 > 1.5 (m >= 22).
SeparationResult separation_experiment(int m, int K);

struct ThroughputRecord {
  std::string algorithm;
  double iterations_per_second = 0.0;
  double ratio_vs_ew = 1.0;
};

// Wall-clock iterations/second per algorithm on an identical problem,
// measured sequentially after a warmup, normalized to the first
// equal-weights entry.
std::vector<ThroughputRecord> measure_throughput(
    const ObjectiveSet& f, const Point& x1,
    const std::vector<RunConfig>& algorithms, double warmup_seconds,
    double duration_seconds);

// 1 - (1-2/m)^K >= 2K/(m+2K); used by the lower-bound argument.
bool geometric_sum_inequality_holds(int m, int K);

}  // namespace amoo

#endif
