#ifndef AMOO_NETS_HPP
#define AMOO_NETS_HPP

#include <cstdint>
#include <vector>

#include "amoo/problems.hpp"

// Two-layer ReLU networks with hand-derived backpropagation, and the
// teacher/student distillation problem whose displacement feeds the
// power-quadratic losses.

namespace amoo {

// h(x) = W2 * relu(W1 x + b1) + b2 with parameters flattened in the order
// W1 (row-major), b1, W2 (row-major), b2.
struct TwoLayerNet {
  int input = 0;
  int hidden = 0;
  int output = 0;

  int param_count() const {
    return hidden * input + hidden + output * hidden + output;
  }

  // Uniform(-s, s) with s = 1/sqrt(fan_in) per layer.
  Point init_params(std::mt19937_64& rng) const;

  struct Activations {
    Matrix z1;  // hidden x batch, pre-activation
    Matrix a1;  // hidden x batch, relu(z1)
    Matrix y;   // output x batch
  };

  Activations forward(const Matrix& x, const Point& theta) const;

  // Parameter gradient given the cotangent u = dLoss/dY. Needs the
  // activations of the matching forward call.
  Point backward(const Matrix& x, const Point& theta, const Activations& act,
                 const Matrix& u) const;
};

// Frozen teacher, trainable student, pre-generated uniform batches and
// precomputed teacher outputs. The optimization point is the student
// parameter vector; displacement(theta, x) = student(x) - teacher(x).
struct DistillationProblem {
  TwoLayerNet net;
  Point teacher_theta;
  Point student_init;
  std::vector<Matrix> batches;           // each input x batch_size
  std::vector<Matrix> teacher_outputs;   // each output x batch_size
  std::vector<PowerQuadraticLoss> losses;
  std::uint64_t seed = 0;

  int num_batches() const { return static_cast<int>(batches.size()); }
  int num_objectives() const { return static_cast<int>(losses.size()); }

  Matrix displacement(int batch, const Point& theta,
                      TwoLayerNet::Activations* act = nullptr) const;

  double batch_loss(int objective, int batch, const Point& theta) const;
  double full_loss(int objective, const Point& theta) const;
  double max_full_loss(const Point& theta) const;

  // Gradient of sum_i w_i * loss_i on one batch (single backward pass).
  Point weighted_batch_gradient(const WeightVector& w, int batch,
                                const Point& theta) const;
  // Per-objective gradients on one batch, as columns.
  Matrix batch_gradients(int batch, const Point& theta) const;

  // Full-dataset objective set view (losses averaged over every batch);
  // used by gradient checks and the generic runners. f_i* = 0.
  ObjectiveSet full_objective_set() const;
};

DistillationProblem make_distillation_problem(
    std::uint64_t seed, int d_i, int hidden, int d_o, int batches,
    int batch_size, std::vector<PowerQuadraticLoss> losses);

}  // namespace amoo

#endif
