#include "amoo/analysis.hpp"

#include <chrono>
#include <cmath>

#include "amoo/problems.hpp"

namespace amoo {

const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::PamooUpper: return "pamoo_upper";
    case BoundKind::MgamooLipschitz: return "mgamoo_lipschitz";
    case BoundKind::Smooth: return "smooth";
    case BoundKind::EwLower: return "ew_lower";
  }
  return "unknown";
}

double pamoo_upper_bound(double lipschitz, double dist, int k, double eps) {
  if (k < 1 || lipschitz <= 0 || dist < 0) {
    throw UsageError("pamoo_upper_bound needs k >= 1, G > 0, dist >= 0");
  }
  return lipschitz * dist / std::sqrt(static_cast<double>(k)) + eps;
}

double mgamoo_lipschitz_bound(double lipschitz, double dist, int k, double eps) {
  if (k < 1 || lipschitz <= 0 || dist < 0) {
    throw UsageError("mgamoo_lipschitz_bound needs k >= 1, G > 0, dist >= 0");
  }
  return 1.5 * lipschitz * dist / std::sqrt(static_cast<double>(k)) + eps;
}

double smooth_bound(double beta, double dist, int k, double eps) {
  if (k < 1 || beta <= 0 || dist < 0) {
    throw UsageError("smooth_bound needs k >= 1, beta > 0, dist >= 0");
  }
  return 2.0 * beta * dist * dist / static_cast<double>(k) + 2.0 * eps;
}

bool BoundReport::all_pass() const {
  for (const BoundCheck& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

BoundConstants derive_constants(const ObjectiveSet& f, const Point& x1,
                                double epsilon) {
  BoundConstants c;
  c.epsilon = epsilon;
  c.m = f.size();
  if (!f.solution_projection) {
    throw ConfigError("objective set has no analytic solution projection");
  }
  c.dist = (x1 - f.solution_projection(x1)).norm();
  bool has_g = true;
  bool has_beta = true;
  double g = 0.0, beta = 0.0;
  for (const Objective& obj : f.objectives) {
    if (obj.lipschitz_bound) g = std::max(g, *obj.lipschitz_bound);
    else has_g = false;
    if (obj.smoothness_bound) beta = std::max(beta, *obj.smoothness_bound);
    else has_beta = false;
  }
  if (has_g) c.lipschitz = g;
  if (has_beta) c.smoothness = beta;
  return c;
}

std::vector<int> log_grid(int K) {
  std::vector<int> grid;
  for (int k = 1; k < K; k *= 2) grid.push_back(k);
  if (K >= 1) grid.push_back(K);
  return grid;
}

BoundReport check_run_against_bounds(const Trajectory& traj,
                                     const ObjectiveSet& f,
                                     const BoundConstants& constants,
                                     const std::vector<BoundKind>& kinds) {
  BoundReport report;
  for (int k : log_grid(traj.steps())) {
    const double empirical = max_gap(f, prefix_average(traj, k));
    for (BoundKind kind : kinds) {
      BoundCheck check;
      check.k = k;
      check.empirical = empirical;
      check.kind = kind;
      switch (kind) {
        case BoundKind::PamooUpper:
          if (!constants.lipschitz) {
            throw ConfigError("pamoo_upper bound needs a Lipschitz constant");
          }
          check.bound = pamoo_upper_bound(*constants.lipschitz, constants.dist,
                                          k, constants.epsilon);
          check.is_upper = true;
          break;
        case BoundKind::MgamooLipschitz:
          if (!constants.lipschitz) {
            throw ConfigError("mgamoo bound needs a Lipschitz constant");
          }
          check.bound = mgamoo_lipschitz_bound(*constants.lipschitz,
                                               constants.dist, k,
                                               constants.epsilon);
          check.is_upper = true;
          break;
        case BoundKind::Smooth:
          if (!constants.smoothness) {
            throw ConfigError("smooth bound needs a smoothness constant");
          }
          check.bound = smooth_bound(*constants.smoothness, constants.dist, k,
                                     constants.epsilon);
          check.is_upper = true;
          break;
        case BoundKind::EwLower: {
          if (!constants.lipschitz) {
            throw ConfigError("ew lower bound needs a Lipschitz constant");
          }
          // the sqrt(K)-form bound is implied only for m/4 <= K <= m
          if (!ew_lower_bound_value(constants.m, *constants.lipschitz,
                                    constants.dist, k)
                   .within_validity) {
            continue;
          }
          check.bound = ew_lower_bound_value(constants.m, *constants.lipschitz,
                                             constants.dist, k)
                            .value;
          check.is_upper = false;
          break;
        }
      }
      if (check.is_upper) {
        check.pass = empirical <= check.bound * (1.0 + kBoundRelTolerance);
        check.slack = check.bound - empirical;
      } else {
        check.pass = empirical >= check.bound * (1.0 - kBoundRelTolerance);
        check.slack = empirical - check.bound;
      }
      report.checks.push_back(check);
    }
  }
  return report;
}

std::pair<double, double> average_gap_bound(const Trajectory& traj,
                                            const ObjectiveSet& f) {
  const double lhs = max_gap(f, average_iterate(traj));
  double rhs = 0.0;
  for (double g : traj.per_step_max_gap) rhs += g;
  rhs /= traj.steps();
  return {lhs, rhs};
}

int count_descent_violations(const Trajectory& traj, const ObjectiveSet& f,
                             const Point& x_star, double eps, double tol) {
  int violations = 0;
  for (int k = 0; k < traj.steps(); ++k) {
    const Point& x = traj.iterates[k];
    const Point& next =
        (k + 1 < traj.steps()) ? traj.iterates[k + 1] : traj.final_point;
    const int sel = traj.selected_indices.empty()
                        ? select_max_gap_index(f, x)
                        : traj.selected_indices[k];
    const double gap = std::max(objective_gap(f.objectives[sel], x) - eps, 0.0);
    const double gnorm2 = f.objectives[sel].gradient(x).squaredNorm();
    double decrease = 0.0;
    if (gnorm2 > 0 && gap > 0) decrease = gap * gap / gnorm2;
    const double lhs = (next - x_star).squaredNorm();
    const double rhs = (x - x_star).squaredNorm() - decrease;
    if (lhs > rhs + tol) ++violations;
  }
  return violations;
}

SeparationResult separation_experiment(int m, int K) {
  if (K > m) {
    throw UsageError("separation experiment requires K <= m");
  }
  const LowerBoundProblem problem = make_lower_bound_problem(m, m, 1.0);
  const double dist =
      (problem.start - problem.objectives.solution_projection(problem.start))
          .norm();

  RunConfig ew;
  ew.algorithm = Algorithm::EwPolyak;
  ew.iterations = K;
  RunConfig mg;
  mg.algorithm = Algorithm::MgamooPolyak;
  mg.iterations = K;

  const Trajectory ew_traj = ew_polyak_run(problem.objectives, problem.start, ew);
  const Trajectory mg_traj = run_algorithm(problem.objectives, problem.start, mg);

  SeparationResult r;
  r.ew_mg = max_gap(problem.objectives, average_iterate(ew_traj));
  r.mgamoo_mg = max_gap(problem.objectives, average_iterate(mg_traj));
  r.ew_lower_bound = ew_lower_bound_value(m, 1.0, dist, K).value;
  r.mgamoo_upper_bound = mgamoo_lipschitz_bound(1.0, dist, K);
  r.separated = r.ew_mg > r.mgamoo_mg && r.ew_mg >= r.ew_lower_bound &&
                r.mgamoo_mg <= r.mgamoo_upper_bound;
  return r;
}

std::vector<ThroughputRecord> measure_throughput(
    const ObjectiveSet& f, const Point& x1,
    const std::vector<RunConfig>& algorithms, double warmup_seconds,
    double duration_seconds) {
  if (duration_seconds <= 0) {
    throw UsageError("throughput duration must be positive");
  }
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  std::vector<ThroughputRecord> records;
  double ew_rate = 0.0;
  for (const RunConfig& base : algorithms) {
    RunConfig chunk = base;
    chunk.iterations = std::max(base.iterations, 1);

    auto t0 = Clock::now();
    while (seconds_since(t0) < warmup_seconds) {
      run_algorithm(f, x1, chunk);
    }

    long iterations = 0;
    t0 = Clock::now();
    double elapsed = 0.0;
    do {
      const Trajectory traj = run_algorithm(f, x1, chunk);
      iterations += traj.steps();
      elapsed = seconds_since(t0);
    } while (elapsed < duration_seconds);

    ThroughputRecord rec;
    rec.algorithm = algorithm_name(base.algorithm);
    rec.iterations_per_second = iterations / elapsed;
    if (records.empty()) {
      ew_rate = rec.iterations_per_second;
      rec.ratio_vs_ew = 1.0;
    } else {
      rec.ratio_vs_ew = rec.iterations_per_second / ew_rate;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

bool geometric_sum_inequality_holds(int m, int K) {
  const double lhs = 1.0 - std::pow(1.0 - 2.0 / m, K);
  const double rhs = 2.0 * K / (m + 2.0 * K);
  return lhs >= rhs - 1e-12;
}

}  // namespace amoo
