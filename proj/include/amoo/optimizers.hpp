#ifndef AMOO_OPTIMIZERS_HPP
#define AMOO_OPTIMIZERS_HPP

#include <memory>
#include <optional>

#include "amoo/core.hpp"

// Weighting/stepping algorithms: equal weights (Polyak and constant-step GD),
// the per-iteration weight QP method, and the max-gap reduction with
// pluggable single-objective optimizers. A single run is strictly sequential;
// distinct runs may share immutable ObjectiveSets across threads.

namespace amoo {

enum class Algorithm {
  EwPolyak,
  EwGd,
  Pamoo,
  MgamooPolyak,
  MgamooGd,
  MgamooOgd,
};

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::EwPolyak;
  int iterations = 0;                          // K
  double epsilon = 0.0;                        // 0 = exact alignment
  std::optional<double> momentum;              // beta_mom in [0,1); max-gap Polyak only
  std::optional<double> ogd_distance_estimate; // D in eta_k = D/(G sqrt(k))
  std::optional<double> gd_step;
  std::optional<double> ew_optimal_value;      // f_EW* override (needed when eps > 0)
  bool stop_on_epsilon = false;

  // Throws ConfigError unless exactly the fields the algorithm uses are set.
  void validate() const;
};

// Single-objective stepping rule: maps (objective, current point, 1-based
// step index) to the next point. Implementations must never produce
// non-finite coordinates.
class SooStep {
 public:
  virtual ~SooStep() = default;
  virtual Point step(const Objective& f, const Point& x, int k) = 0;
  // Step magnitude of the last call, for trajectory records.
  virtual double last_step_size() const = 0;
};

// eta = (f(x) - f* - eps) / ||grad f(x)||^2, clamped at zero.
class PolyakStep : public SooStep {
 public:
  explicit PolyakStep(double epsilon = 0.0) : epsilon_(epsilon) {}
  Point step(const Objective& f, const Point& x, int k) override;
  double last_step_size() const override { return last_eta_; }

 private:
  double epsilon_;
  double last_eta_ = 0.0;
};

// Constant step x - eta * grad f(x); eta = 1/(2 beta) for the smooth case.
class GdStep : public SooStep {
 public:
  explicit GdStep(double eta) : eta_(eta) {
    if (eta < 0) throw ConfigError("gd step must be nonnegative");
  }
  Point step(const Objective& f, const Point& x, int k) override;
  double last_step_size() const override { return eta_; }

 private:
  double eta_;
};

// Online gradient descent with eta_k = D / (G sqrt(k)).
class OgdStep : public SooStep {
 public:
  OgdStep(double distance_estimate, double lipschitz)
      : distance_(distance_estimate), lipschitz_(lipschitz) {
    if (distance_ <= 0 || lipschitz_ <= 0) {
      throw ConfigError("ogd needs positive distance estimate and Lipschitz bound");
    }
  }
  Point step(const Objective& f, const Point& x, int k) override;
  double last_step_size() const override { return last_eta_; }

 private:
  double distance_;
  double lipschitz_;
  double last_eta_ = 0.0;
};

// Equal-weights with the Polyak step size on f_EW = (1/m) sum f_i.
Trajectory ew_polyak_run(const ObjectiveSet& f, const Point& x1,
                         const RunConfig& cfg);

// Equal-weights with a constant step; aborts with NumericError when the
// max gap exceeds 1e6x its starting value.
Trajectory ew_gd_run(const ObjectiveSet& f, const Point& x1,
                     const RunConfig& cfg);

// Weight QP method: w_k maximizes 2 w^T delta - w^T J^T J w over w >= 0,
// then x_{k+1} = x_k - J w_k. With cfg.epsilon > 0 the gaps entering delta
// are shifted by -eps and clamped at zero.
Trajectory pamoo_run(const ObjectiveSet& f, const Point& x1,
                     const RunConfig& cfg);

// Max-gap reduction: hand the worst objective to the given stepping rule.
// With cfg.stop_on_epsilon, returns early once MG(x_k) < cfg.epsilon.
// With cfg.momentum, weights are averaged across steps and the update is a
// Polyak step on the weighted objective (Polyak variant only).
Trajectory mgamoo_run(const ObjectiveSet& f, const Point& x1,
                      const RunConfig& cfg, SooStep& soo);

// Builds the stepping rule implied by cfg (gd_step and ogd distance fall
// back to problem constants when unset) and runs the configured algorithm.
Trajectory run_algorithm(const ObjectiveSet& f, const Point& x1,
                         const RunConfig& cfg);

// w <- (1 - beta) * prev + beta * next, elementwise.
WeightVector apply_momentum(const WeightVector& prev, const WeightVector& next,
                            double beta_mom);

// max_i lipschitz_bound / smoothness_bound over the set; ConfigError if any
// objective lacks the constant.
double set_lipschitz_bound(const ObjectiveSet& f);
double set_smoothness_bound(const ObjectiveSet& f);

}  // namespace amoo

#endif
