#ifndef AMOO_EXPERIMENTS_HPP
#define AMOO_EXPERIMENTS_HPP

#include <vector>

#include "amoo/nets.hpp"

// Stochastic training loop for the distillation problems: a weighting rule
// picks w_k from the current batch losses, then one SGD step is applied to
// the weighted loss. Batches cycle in recorded order, so a run is a pure
// function of (problem, config).

namespace amoo {

enum class WeightRule {
  EqualWeights,   // w = 1/m
  WeightQp,       // nonnegative QP over the batch gradients
  MaxGapPolyak,   // one-hot on the worst batch loss, Polyak-scaled step
};

const char* weight_rule_name(WeightRule rule);

struct BackendConfig {
  WeightRule rule = WeightRule::EqualWeights;
  bool momentum = false;
  double beta_mom = 0.95;
  double learning_rate = 0.01;
  int iterations = 1000;
  int record_every = 10;  // max-batch-loss history granularity
};

struct BackendResult {
  Point final_theta;
  double final_max_loss = 0.0;             // full-dataset max_i f_i
  std::vector<double> max_batch_loss;      // sampled every record_every steps
  std::vector<int> recorded_steps;
};

BackendResult sgd_backend_run(const DistillationProblem& problem,
                              const BackendConfig& cfg);

}  // namespace amoo

#endif
