#include "amoo/nets.hpp"

#include <cmath>
#include <memory>

namespace amoo {

namespace {

using ConstMatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                   Eigen::Dynamic, Eigen::RowMajor>>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

struct ParamView {
  ConstMatMap w1;
  ConstVecMap b1;
  ConstMatMap w2;
  ConstVecMap b2;
};

ParamView view(const TwoLayerNet& net, const Point& theta) {
  const double* p = theta.data();
  return ParamView{
      ConstMatMap(p, net.hidden, net.input),
      ConstVecMap(p + net.hidden * net.input, net.hidden),
      ConstMatMap(p + net.hidden * net.input + net.hidden, net.output,
                  net.hidden),
      ConstVecMap(p + net.hidden * net.input + net.hidden +
                      net.output * net.hidden,
                  net.output)};
}

}  // namespace

Point TwoLayerNet::init_params(std::mt19937_64& rng) const {
  Point theta(param_count());
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u1(-s1, s1);
  std::uniform_real_distribution<double> u2(-s2, s2);
  int at = 0;
  for (int i = 0; i < hidden * input + hidden; ++i) theta[at++] = u1(rng);
  for (int i = 0; i < output * hidden + output; ++i) theta[at++] = u2(rng);
  return theta;
}

TwoLayerNet::Activations TwoLayerNet::forward(const Matrix& x,
                                              const Point& theta) const {
  if (theta.size() != param_count()) {
    throw UsageError("parameter vector size mismatch");
  }
  const ParamView p = view(*this, theta);
  Activations act;
  act.z1 = (p.w1 * x).colwise() + p.b1;
  act.a1 = act.z1.cwiseMax(0.0);
  act.y = (p.w2 * act.a1).colwise() + p.b2;
  return act;
}

Point TwoLayerNet::backward(const Matrix& x, const Point& theta,
                            const Activations& act, const Matrix& u) const {
  const ParamView p = view(*this, theta);
  Point grad = Point::Zero(param_count());
  double* g = grad.data();
  MatMap gw1(g, hidden, input);
  VecMap gb1(g + hidden * input, hidden);
  MatMap gw2(g + hidden * input + hidden, output, hidden);
  VecMap gb2(g + hidden * input + hidden + output * hidden, output);

  gw2 = u * act.a1.transpose();
  gb2 = u.rowwise().sum();
  const Matrix v =
      (p.w2.transpose() * u).cwiseProduct((act.z1.array() > 0.0).cast<double>().matrix());
  gw1 = v * x.transpose();
  gb1 = v.rowwise().sum();
  return grad;
}

Matrix DistillationProblem::displacement(int batch, const Point& theta,
                                         TwoLayerNet::Activations* act) const {
  TwoLayerNet::Activations a = net.forward(batches[batch], theta);
  Matrix d = a.y - teacher_outputs[batch];
  if (act != nullptr) *act = std::move(a);
  return d;
}

double DistillationProblem::batch_loss(int objective, int batch,
                                       const Point& theta) const {
  return losses[objective].batch_value(displacement(batch, theta));
}

double DistillationProblem::full_loss(int objective, const Point& theta) const {
  double sum = 0.0;
  for (int b = 0; b < num_batches(); ++b) {
    sum += batch_loss(objective, b, theta);
  }
  return sum / num_batches();
}

double DistillationProblem::max_full_loss(const Point& theta) const {
  double worst = 0.0;
  for (int i = 0; i < num_objectives(); ++i) {
    worst = std::max(worst, full_loss(i, theta));
  }
  return worst;
}

Point DistillationProblem::weighted_batch_gradient(const WeightVector& w,
                                                   int batch,
                                                   const Point& theta) const {
  TwoLayerNet::Activations act;
  const Matrix d = displacement(batch, theta, &act);
  Matrix u = Matrix::Zero(d.rows(), d.cols());
  for (int i = 0; i < num_objectives(); ++i) {
    if (w[i] != 0.0) u += w[i] * losses[i].batch_cotangent(d);
  }
  return net.backward(batches[batch], theta, act, u);
}

Matrix DistillationProblem::batch_gradients(int batch, const Point& theta) const {
  TwoLayerNet::Activations act;
  const Matrix d = displacement(batch, theta, &act);
  Matrix grads(net.param_count(), num_objectives());
  for (int i = 0; i < num_objectives(); ++i) {
    grads.col(i) =
        net.backward(batches[batch], theta, act, losses[i].batch_cotangent(d));
  }
  return grads;
}

ObjectiveSet DistillationProblem::full_objective_set() const {
  ObjectiveSet set;
  set.dimension = net.param_count();
  const auto shared = std::make_shared<const DistillationProblem>(*this);
  for (int i = 0; i < num_objectives(); ++i) {
    Objective obj;
    obj.name = "distill_" + std::to_string(i);
    obj.optimal_value = 0.0;
    obj.value = [shared, i](const Point& theta) {
      return shared->full_loss(i, theta);
    };
    obj.gradient = [shared, i](const Point& theta) {
      Point g = Point::Zero(shared->net.param_count());
      WeightVector w = WeightVector::Zero(shared->num_objectives());
      w[i] = 1.0;
      for (int b = 0; b < shared->num_batches(); ++b) {
        g += shared->weighted_batch_gradient(w, b, theta);
      }
      return (g / shared->num_batches()).eval();
    };
    set.objectives.push_back(std::move(obj));
  }
  // One forward per batch serves every loss; one backward serves any
  // weighted combination.
  set.all_values = [shared](const Point& theta) {
    Point values = Point::Zero(shared->num_objectives());
    for (int b = 0; b < shared->num_batches(); ++b) {
      const Matrix d = shared->displacement(b, theta);
      for (int i = 0; i < shared->num_objectives(); ++i) {
        values[i] += shared->losses[i].batch_value(d);
      }
    }
    return (values / shared->num_batches()).eval();
  };
  set.weighted_gradient = [shared](const Point& theta, const WeightVector& w) {
    Point g = Point::Zero(shared->net.param_count());
    for (int b = 0; b < shared->num_batches(); ++b) {
      g += shared->weighted_batch_gradient(w, b, theta);
    }
    return (g / shared->num_batches()).eval();
  };

  // Student == teacher zeroes the displacement, so the residual per-loss
  // value there bounds the misalignment of the family.
  double eps = 0.0;
  const Point zero_d = Point::Zero(net.output);
  for (const auto& loss : losses) eps = std::max(eps, loss.value(zero_d));
  set.alignment_epsilon = eps;
  return set;
}

DistillationProblem make_distillation_problem(
    std::uint64_t seed, int d_i, int hidden, int d_o, int batches,
    int batch_size, std::vector<PowerQuadraticLoss> losses) {
  if (d_i < 1 || hidden < 1 || d_o < 1 || batches < 1 || batch_size < 1) {
    throw ConfigError("distillation problem dimensions must all be >= 1");
  }
  for (const auto& loss : losses) {
    if (loss.h_diag.size() != d_o) {
      throw ConfigError("loss diagonal size must equal the network output size");
    }
  }
  DistillationProblem p;
  p.seed = seed;
  p.net = TwoLayerNet{d_i, hidden, d_o};
  p.losses = std::move(losses);

  auto teacher_rng = make_rng(seed, 1);
  auto student_rng = make_rng(seed, 2);
  auto data_rng = make_rng(seed, 3);
  p.teacher_theta = p.net.init_params(teacher_rng);
  p.student_init = p.net.init_params(student_rng);

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  p.batches.reserve(batches);
  p.teacher_outputs.reserve(batches);
  for (int b = 0; b < batches; ++b) {
    Matrix x(d_i, batch_size);
    for (int c = 0; c < batch_size; ++c) {
      for (int r = 0; r < d_i; ++r) x(r, c) = unit(data_rng);
    }
    p.teacher_outputs.push_back(p.net.forward(x, p.teacher_theta).y);
    p.batches.push_back(std::move(x));
  }
  return p;
}

}  // namespace amoo
