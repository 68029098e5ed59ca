#include "amoo/optimizers.hpp"

#include <cmath>

#include "amoo/weights_qp.hpp"

namespace amoo {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::EwPolyak: return "ew_polyak";
    case Algorithm::EwGd: return "ew_gd";
    case Algorithm::Pamoo: return "pamoo";
    case Algorithm::MgamooPolyak: return "mgamoo_polyak";
    case Algorithm::MgamooGd: return "mgamoo_gd";
    case Algorithm::MgamooOgd: return "mgamoo_ogd";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  for (Algorithm a : {Algorithm::EwPolyak, Algorithm::EwGd, Algorithm::Pamoo,
                      Algorithm::MgamooPolyak, Algorithm::MgamooGd,
                      Algorithm::MgamooOgd}) {
    if (name == algorithm_name(a)) return a;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (epsilon < 0) throw ConfigError("epsilon must be >= 0");
  if (stop_on_epsilon && epsilon <= 0) {
    throw ConfigError("stop_on_epsilon requires epsilon > 0");
  }
  if (momentum) {
    if (algorithm != Algorithm::MgamooPolyak) {
      throw ConfigError("momentum is only defined for mgamoo_polyak");
    }
    if (*momentum < 0 || *momentum >= 1) {
      throw ConfigError("momentum must lie in [0,1)");
    }
  }
  const bool wants_gd = algorithm == Algorithm::EwGd || algorithm == Algorithm::MgamooGd;
  if (gd_step && !wants_gd) {
    throw ConfigError("gd_step is only used by ew_gd and mgamoo_gd");
  }
  if (algorithm == Algorithm::EwGd && (!gd_step || *gd_step < 0)) {
    throw ConfigError("ew_gd requires gd_step >= 0");
  }
  if (ogd_distance_estimate &&
      (algorithm != Algorithm::MgamooOgd || *ogd_distance_estimate <= 0)) {
    throw ConfigError("ogd_distance_estimate is only used by mgamoo_ogd and must be > 0");
  }
  if (ew_optimal_value && algorithm != Algorithm::EwPolyak) {
    throw ConfigError("ew_optimal_value is only used by ew_polyak");
  }
}

WeightVector apply_momentum(const WeightVector& prev, const WeightVector& next,
                            double beta_mom) {
  if (prev.size() != next.size()) {
    throw UsageError("momentum weight length mismatch");
  }
  if (beta_mom < 0 || beta_mom >= 1) {
    throw UsageError("beta_mom must lie in [0,1)");
  }
  return (1.0 - beta_mom) * prev + beta_mom * next;
}

double set_lipschitz_bound(const ObjectiveSet& f) {
  double g = 0.0;
  for (const Objective& obj : f.objectives) {
    if (!obj.lipschitz_bound) {
      throw ConfigError("objective '" + obj.name + "' has no Lipschitz bound");
    }
    g = std::max(g, *obj.lipschitz_bound);
  }
  return g;
}

double set_smoothness_bound(const ObjectiveSet& f) {
  double beta = 0.0;
  for (const Objective& obj : f.objectives) {
    if (!obj.smoothness_bound) {
      throw ConfigError("objective '" + obj.name + "' has no smoothness bound");
    }
    beta = std::max(beta, *obj.smoothness_bound);
  }
  return beta;
}

namespace {

constexpr double kStallGradNorm = 1e-14;

Point all_gaps(const ObjectiveSet& f, const Point& x) {
  if (f.all_values) {
    Point gaps = f.all_values(x);
    if (!gaps.allFinite()) throw NumericError("non-finite objective value");
    for (int i = 0; i < f.size(); ++i) {
      gaps[i] -= f.objectives[i].optimal_value;
      if (gaps[i] < -kEvalTolerance) {
        throw NumericError("objective '" + f.objectives[i].name +
                           "' evaluated below its recorded optimal value");
      }
    }
    return gaps;
  }
  Point gaps(f.size());
  for (int i = 0; i < f.size(); ++i) {
    gaps[i] = objective_gap(f.objectives[i], x);
  }
  return gaps;
}

Point mean_gradient(const ObjectiveSet& f, const Point& x) {
  if (f.weighted_gradient) {
    return f.weighted_gradient(
        x, WeightVector::Constant(f.size(), 1.0 / f.size()));
  }
  Point g = Point::Zero(x.size());
  for (const Objective& obj : f.objectives) g += obj.gradient(x);
  return g / f.size();
}

int argmax_lowest(const Point& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void record_step(Trajectory& traj, const Point& x, double mg, int selected,
                 double step_size, WeightVector w) {
  traj.iterates.push_back(x);
  traj.per_step_max_gap.push_back(mg);
  traj.selected_indices.push_back(selected);
  traj.step_sizes.push_back(step_size);
  traj.weights.push_back(std::move(w));
}

}  // namespace

Point PolyakStep::step(const Objective& f, const Point& x, int k) {
  (void)k;
  const double gap = objective_gap(f, x);
  const double numerator = std::max(gap - epsilon_, 0.0);
  last_eta_ = 0.0;
  if (numerator <= kEvalTolerance) return x;
  const Point g = f.gradient(x);
  const double gnorm2 = g.squaredNorm();
  if (gnorm2 <= kStallGradNorm * kStallGradNorm) {
    throw NumericError("polyak step stalled on '" + f.name +
                       "': zero gradient with gap " + std::to_string(gap));
  }
  last_eta_ = numerator / gnorm2;
  Point next = x - last_eta_ * g;
  if (!next.allFinite()) throw NumericError("polyak step produced non-finite point");
  return next;
}

Point GdStep::step(const Objective& f, const Point& x, int k) {
  (void)k;
  Point next = x - eta_ * f.gradient(x);
  if (!next.allFinite()) throw NumericError("gd step produced non-finite point");
  return next;
}

Point OgdStep::step(const Objective& f, const Point& x, int k) {
  last_eta_ = distance_ / (lipschitz_ * std::sqrt(static_cast<double>(k)));
  Point next = x - last_eta_ * f.gradient(x);
  if (!next.allFinite()) throw NumericError("ogd step produced non-finite point");
  return next;
}

Trajectory ew_polyak_run(const ObjectiveSet& f, const Point& x1,
                         const RunConfig& cfg) {
  cfg.validate();
  const int m = f.size();
  double fstar_ew = 0.0;
  if (cfg.ew_optimal_value) {
    fstar_ew = *cfg.ew_optimal_value;
  } else if (f.ew_optimal_value) {
    fstar_ew = *f.ew_optimal_value;
  } else if (cfg.epsilon == 0.0 && f.alignment_epsilon == 0.0) {
    for (const Objective& obj : f.objectives) fstar_ew += obj.optimal_value;
    fstar_ew /= m;
  } else {
    throw ConfigError(
        "f_EW* must be supplied explicitly for approximately aligned problems");
  }

  const WeightVector uniform = WeightVector::Constant(m, 1.0 / m);
  Trajectory traj;
  Point x = x1;
  for (int k = 1; k <= cfg.iterations; ++k) {
    const Point gaps = all_gaps(f, x);
    const int sel = argmax_lowest(gaps);
    double f_ew = 0.0;
    for (int i = 0; i < m; ++i) f_ew += gaps[i] + f.objectives[i].optimal_value;
    f_ew /= m;
    const double ew_gap = f_ew - fstar_ew;

    double eta = 0.0;
    Point g = Point::Zero(x.size());
    if (ew_gap > kEvalTolerance) {
      g = mean_gradient(f, x);
      const double gnorm2 = g.squaredNorm();
      if (gnorm2 <= kStallGradNorm * kStallGradNorm) {
        if (cfg.epsilon > 0 && gaps[sel] <= cfg.epsilon) {
          record_step(traj, x, gaps[sel], sel, 0.0, uniform);
          traj.stopped_early = true;
          traj.stop_index = k;
          traj.final_point = x;
          return traj;
        }
        throw NumericError("ew_polyak stalled: zero gradient with EW gap " +
                           std::to_string(ew_gap));
      }
      eta = ew_gap / gnorm2;
    }
    record_step(traj, x, gaps[sel], sel, eta, uniform);
    if (eta != 0.0) x -= eta * g;
    if (!x.allFinite()) throw NumericError("ew_polyak produced non-finite point");
  }
  traj.final_point = x;
  return traj;
}

Trajectory ew_gd_run(const ObjectiveSet& f, const Point& x1,
                     const RunConfig& cfg) {
  cfg.validate();
  const int m = f.size();
  const double eta = *cfg.gd_step;
  const WeightVector uniform = WeightVector::Constant(m, 1.0 / m);

  Trajectory traj;
  Point x = x1;
  double mg1 = 0.0;
  for (int k = 1; k <= cfg.iterations; ++k) {
    const Point gaps = all_gaps(f, x);
    const int sel = argmax_lowest(gaps);
    if (k == 1) mg1 = gaps[sel];
    if (gaps[sel] > 1e6 * std::max(mg1, kEvalTolerance)) {
      throw NumericError("ew_gd diverged: max gap grew past 1e6x its start");
    }
    record_step(traj, x, gaps[sel], sel, eta, uniform);
    if (eta != 0.0) x -= eta * mean_gradient(f, x);
    if (!x.allFinite()) throw NumericError("ew_gd produced non-finite point");
  }
  traj.final_point = x;
  return traj;
}

Trajectory pamoo_run(const ObjectiveSet& f, const Point& x1,
                     const RunConfig& cfg) {
  cfg.validate();
  const int m = f.size();
  Trajectory traj;
  Point x = x1;
  for (int k = 1; k <= cfg.iterations; ++k) {
    const Point gaps = all_gaps(f, x);
    const int sel = argmax_lowest(gaps);

    if (cfg.stop_on_epsilon && gaps[sel] < cfg.epsilon) {
      record_step(traj, x, gaps[sel], sel, 0.0, WeightVector::Zero(m));
      traj.stopped_early = true;
      traj.stop_index = k;
      traj.final_point = x;
      return traj;
    }

    WeightSubproblem sub;
    sub.delta = (gaps.array() - cfg.epsilon).cwiseMax(0.0);
    const GramResult gram = gram_matrix(f, x);
    sub.gram = gram.gram;

    QpSolution sol;
    if (cfg.epsilon > 0) {
      // Only objectives strictly beyond the misalignment budget may carry
      // weight; clamped zero entries stay out of the subproblem.
      std::vector<int> support;
      for (int i = 0; i < m; ++i) {
        if (sub.delta[i] > 0) support.push_back(i);
      }
      sol = solve_nonneg_qp(sub, 1e-10, 10000, &support);
    } else {
      sol = solve_nonneg_qp(sub);
    }
    traj.qp_converged = traj.qp_converged && sol.converged;
    traj.qp_dropped_indices += static_cast<int>(sol.dropped_indices.size());

    record_step(traj, x, gaps[sel], sel, 1.0, sol.w);
    x -= gram.gradients * sol.w;
    if (!x.allFinite()) throw NumericError("pamoo produced non-finite point");
  }
  traj.final_point = x;
  return traj;
}

Trajectory mgamoo_run(const ObjectiveSet& f, const Point& x1,
                      const RunConfig& cfg, SooStep& soo) {
  cfg.validate();
  const int m = f.size();
  Trajectory traj;
  Point x = x1;
  WeightVector w_avg;
  for (int k = 1; k <= cfg.iterations; ++k) {
    const Point gaps = all_gaps(f, x);
    const int sel = argmax_lowest(gaps);
    WeightVector one_hot = WeightVector::Zero(m);
    one_hot[sel] = 1.0;

    if (cfg.stop_on_epsilon && gaps[sel] < cfg.epsilon) {
      record_step(traj, x, gaps[sel], sel, 0.0, one_hot);
      traj.stopped_early = true;
      traj.stop_index = k;
      traj.final_point = x;
      return traj;
    }

    if (cfg.momentum) {
      w_avg = (k == 1) ? one_hot : apply_momentum(w_avg, one_hot, *cfg.momentum);
      // Polyak step on the averaged objective f_w, with f_w* = w^T f*.
      const double w_gap = std::max(w_avg.dot(gaps) - cfg.epsilon * w_avg.sum(), 0.0);
      double eta = 0.0;
      if (w_gap > kEvalTolerance) {
        Point g;
        if (f.weighted_gradient) {
          g = f.weighted_gradient(x, w_avg);
        } else {
          g = Point::Zero(x.size());
          for (int i = 0; i < m; ++i) {
            if (w_avg[i] != 0.0) g += w_avg[i] * f.objectives[i].gradient(x);
          }
        }
        const double gnorm2 = g.squaredNorm();
        if (gnorm2 <= kStallGradNorm * kStallGradNorm) {
          throw NumericError("mgamoo momentum step stalled: zero gradient");
        }
        eta = w_gap / gnorm2;
        record_step(traj, x, gaps[sel], sel, eta, w_avg);
        x -= eta * g;
      } else {
        record_step(traj, x, gaps[sel], sel, 0.0, w_avg);
      }
    } else {
      Point next = soo.step(f.objectives[sel], x, k);
      record_step(traj, x, gaps[sel], sel, soo.last_step_size(), one_hot);
      x = std::move(next);
    }
    if (!x.allFinite()) throw NumericError("mgamoo produced non-finite point");
  }
  traj.final_point = x;
  return traj;
}

Trajectory run_algorithm(const ObjectiveSet& f, const Point& x1,
                         const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::EwPolyak:
      return ew_polyak_run(f, x1, cfg);
    case Algorithm::EwGd:
      return ew_gd_run(f, x1, cfg);
    case Algorithm::Pamoo:
      return pamoo_run(f, x1, cfg);
    case Algorithm::MgamooPolyak: {
      PolyakStep soo(cfg.epsilon);
      return mgamoo_run(f, x1, cfg, soo);
    }
    case Algorithm::MgamooGd: {
      const double eta = cfg.gd_step ? *cfg.gd_step
                                     : 1.0 / (2.0 * set_smoothness_bound(f));
      GdStep soo(eta);
      return mgamoo_run(f, x1, cfg, soo);
    }
    case Algorithm::MgamooOgd: {
      double dist = 0.0;
      if (cfg.ogd_distance_estimate) {
        dist = *cfg.ogd_distance_estimate;
      } else if (f.solution_projection) {
        dist = (x1 - f.solution_projection(x1)).norm();
      } else {
        throw ConfigError(
            "mgamoo_ogd needs a distance estimate or a problem with a known "
            "solution projection");
      }
      OgdStep soo(dist, set_lipschitz_bound(f));
      return mgamoo_run(f, x1, cfg, soo);
    }
  }
  throw UsageError("unhandled algorithm");
}

}  // namespace amoo
