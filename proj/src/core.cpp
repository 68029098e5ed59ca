#include "amoo/core.hpp"

#include <cmath>

namespace amoo {

bool all_finite(const Point& x) { return x.allFinite(); }

double objective_gap(const Objective& obj, const Point& x) {
  const double v = obj.value(x);
  if (!std::isfinite(v)) {
    throw NumericError("non-finite objective value for '" + obj.name + "'");
  }
  const double gap = v - obj.optimal_value;
  if (gap < -kEvalTolerance) {
    throw NumericError("objective '" + obj.name +
                       "' evaluated below its recorded optimal value (gap " +
                       std::to_string(gap) + "); f* is inconsistent");
  }
  return gap;
}

namespace {

void check_dimension(const ObjectiveSet& f, const Point& x) {
  if (x.size() != f.dimension) {
    throw ConfigError("point dimension " + std::to_string(x.size()) +
                      " does not match objective set dimension " +
                      std::to_string(f.dimension));
  }
  if (f.objectives.empty()) {
    throw ConfigError("objective set is empty");
  }
}

}  // namespace

double max_gap(const ObjectiveSet& f, const Point& x) {
  check_dimension(f, x);
  double best = -std::numeric_limits<double>::infinity();
  for (const Objective& obj : f.objectives) {
    best = std::max(best, objective_gap(obj, x));
  }
  return best;
}

int select_max_gap_index(const ObjectiveSet& f, const Point& x) {
  check_dimension(f, x);
  int best_index = 0;
  double best = objective_gap(f.objectives[0], x);
  for (int i = 1; i < f.size(); ++i) {
    const double gap = objective_gap(f.objectives[i], x);
    if (gap > best) {
      best = gap;
      best_index = i;
    }
  }
  return best_index;
}

Point average_iterate(const Trajectory& traj) {
  return prefix_average(traj, traj.steps());
}

Point prefix_average(const Trajectory& traj, int k) {
  if (traj.iterates.empty()) {
    throw UsageError("average of an empty trajectory");
  }
  if (k < 1 || k > traj.steps()) {
    throw UsageError("prefix length " + std::to_string(k) +
                     " out of range 1.." + std::to_string(traj.steps()));
  }
  // Mean anchored at the first iterate, so a constant trajectory averages
  // to that constant exactly.
  const Point& anchor = traj.iterates[0];
  Point sum = Point::Zero(anchor.size());
  for (int i = 1; i < k; ++i) {
    sum += traj.iterates[i] - anchor;
  }
  return anchor + sum / static_cast<double>(k);
}

bool is_in_epsilon_set(const ObjectiveSet& f, const Point& x, double eps) {
  if (eps < 0) {
    throw UsageError("epsilon must be nonnegative");
  }
  return max_gap(f, x) <= eps;
}

}  // namespace amoo
