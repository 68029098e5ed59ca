#include "amoo/experiments.hpp"

#include <cmath>

#include "amoo/optimizers.hpp"
#include "amoo/weights_qp.hpp"

namespace amoo {

const char* weight_rule_name(WeightRule rule) {
  switch (rule) {
    case WeightRule::EqualWeights: return "ew";
    case WeightRule::WeightQp: return "pamoo";
    case WeightRule::MaxGapPolyak: return "mgamoo_polyak";
  }
  return "unknown";
}

BackendResult sgd_backend_run(const DistillationProblem& problem,
                              const BackendConfig& cfg) {
  if (cfg.iterations < 1 || cfg.learning_rate <= 0) {
    throw ConfigError("backend run needs iterations >= 1 and learning_rate > 0");
  }
  const int m = problem.num_objectives();
  Point theta = problem.student_init;
  WeightVector w = WeightVector::Constant(m, 1.0 / m);
  WeightVector w_avg;

  BackendResult result;
  for (int k = 1; k <= cfg.iterations; ++k) {
    const int batch = (k - 1) % problem.num_batches();
    Point losses(m);
    for (int i = 0; i < m; ++i) {
      losses[i] = problem.batch_loss(i, batch, theta);
    }
    if (!losses.allFinite()) {
      throw NumericError("backend run diverged at step " + std::to_string(k));
    }

    double scale = 1.0;
    switch (cfg.rule) {
      case WeightRule::EqualWeights:
        break;
      case WeightRule::WeightQp: {
        WeightSubproblem sub;
        sub.delta = losses;  // f_i* = 0
        const Matrix grads = problem.batch_gradients(batch, theta);
        sub.gram = grads.transpose() * grads;
        w = solve_nonneg_qp(sub).w;
        break;
      }
      case WeightRule::MaxGapPolyak: {
        int sel = 0;
        losses.maxCoeff(&sel);
        WeightVector one_hot = WeightVector::Zero(m);
        one_hot[sel] = 1.0;
        if (cfg.momentum) {
          w_avg = (k == 1) ? one_hot
                           : apply_momentum(w_avg, one_hot, cfg.beta_mom);
          w = w_avg;
        } else {
          w = one_hot;
        }
        break;
      }
    }

    Point grad = problem.weighted_batch_gradient(w, batch, theta);
    if (cfg.rule == WeightRule::MaxGapPolyak) {
      const double gnorm2 = grad.squaredNorm();
      if (gnorm2 > 1e-24) scale = w.dot(losses) / gnorm2;
    }
    theta -= cfg.learning_rate * scale * grad;
    if (!theta.allFinite()) {
      throw NumericError("backend run produced non-finite parameters");
    }

    if (k % cfg.record_every == 0 || k == cfg.iterations) {
      result.max_batch_loss.push_back(losses.maxCoeff());
      result.recorded_steps.push_back(k);
    }
  }
  result.final_theta = theta;
  result.final_max_loss = problem.max_full_loss(theta);
  return result;
}

}  // namespace amoo
