#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "amoo/problems.hpp"
#include "amoo/weights_qp.hpp"

using namespace amoo;

namespace {

WeightSubproblem random_instance(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.0, 0.5);
  Matrix a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = entry(rng);
  }
  WeightSubproblem p;
  p.gram = a.transpose() * a + 0.1 * Matrix::Identity(m, m);
  p.delta = Point(m);
  for (int i = 0; i < m; ++i) p.delta[i] = gap(rng);
  return p;
}

}  // namespace

TEST_CASE("gram matrix basics") {
  ObjectiveSet f;
  f.dimension = 1;
  Objective half_sq;
  half_sq.value = [](const Point& x) { return 0.5 * x[0] * x[0]; };
  half_sq.gradient = [](const Point& x) { return Point::Constant(1, x[0]); };
  f.objectives.push_back(half_sq);
  const auto r = gram_matrix(f, Point::Constant(1, 1.0));
  CHECK(r.gram(0, 0) == doctest::Approx(1.0));

  // duplicated gradient columns give a rank-1 gram
  ObjectiveSet two;
  two.dimension = 3;
  for (int i = 0; i < 2; ++i) {
    Objective obj;
    obj.value = [](const Point& x) { return x.sum(); };
    obj.gradient = [](const Point& x) { return Point::Ones(x.size()).eval(); };
    two.objectives.push_back(std::move(obj));
  }
  const auto r2 = gram_matrix(two, Point::Zero(3));
  CHECK(r2.gram(0, 0) == doctest::Approx(3.0));
  CHECK(r2.gram(0, 1) == doctest::Approx(3.0));
  CHECK(r2.gram(1, 1) == doctest::Approx(3.0));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(r2.gram);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));

  // orthonormal gradients give the identity
  ObjectiveSet ortho;
  ortho.dimension = 2;
  for (int i = 0; i < 2; ++i) {
    Objective obj;
    obj.value = [i](const Point& x) { return x[i]; };
    obj.gradient = [i](const Point& x) {
      Point g = Point::Zero(x.size());
      g[i] = 1.0;
      return g;
    };
    ortho.objectives.push_back(std::move(obj));
  }
  CHECK(gram_matrix(ortho, Point::Zero(2)).gram.isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("solver on hand-checkable instances") {
  WeightSubproblem p;
  p.delta = (Point(2) << 1.0, 0.5).finished();
  p.gram = Matrix::Identity(2, 2);
  const auto sol = solve_nonneg_qp(p);
  CHECK(sol.converged);
  CHECK(sol.w[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.w[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.value == doctest::Approx(1.25).epsilon(1e-10));

  // flat optimum: assert the value, not the maximizer
  WeightSubproblem flat;
  flat.delta = (Point(2) << 1.0, 1.0).finished();
  flat.gram = Matrix::Ones(2, 2);
  CHECK(solve_nonneg_qp(flat).value == doctest::Approx(1.0).epsilon(1e-8));

  // single objective reduces to the Polyak step magnitude
  WeightSubproblem single;
  single.delta = Point::Constant(1, 0.5);
  single.gram = Matrix::Identity(1, 1);
  CHECK(solve_nonneg_qp(single).w[0] == doctest::Approx(0.5));
}

TEST_CASE("oracle on hand-checkable instances") {
  WeightSubproblem p;
  p.delta = (Point(2) << 1.0, 0.5).finished();
  p.gram = Matrix::Identity(2, 2);
  const auto r = brute_force_qp_oracle(p, 2.0, 401);
  CHECK(r.best_value == doctest::Approx(1.25).epsilon(1e-4));

  WeightSubproblem zero;
  zero.delta = Point::Zero(2);
  zero.gram = Matrix::Identity(2, 2);
  const auto rz = brute_force_qp_oracle(zero, 2.0, 101);
  CHECK(rz.best_value == doctest::Approx(0.0));
  CHECK(rz.best_w.isApprox(Point::Zero(2)));

  WeightSubproblem big;
  big.delta = Point::Zero(4);
  big.gram = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(brute_force_qp_oracle(big, 1.0, 11), UsageError);
}

TEST_CASE("solver dominates the grid oracle") {
  auto rng = make_rng(2024);
  for (int t = 0; t < 30; ++t) {
    const int m = 1 + t % 3;
    const WeightSubproblem p = random_instance(m, rng);
    const auto sol = solve_nonneg_qp(p);
    const auto oracle = brute_force_qp_oracle(p, 2.0, m == 3 ? 101 : 401);
    CHECK(sol.value >= oracle.best_value - 1e-6);
    CHECK(qp_objective(p, sol.w) == doctest::Approx(sol.value).epsilon(1e-10));
  }
}

TEST_CASE("one-hot lower bound on the solver value") {
  auto rng = make_rng(77);
  for (int t = 0; t < 50; ++t) {
    const int m = 1 + t % 3;
    const WeightSubproblem p = random_instance(m, rng);
    const auto sol = solve_nonneg_qp(p);
    for (int i = 0; i < m; ++i) {
      if (p.gram(i, i) > 0 && p.delta[i] >= 0) {
        CHECK(sol.value >= p.delta[i] * p.delta[i] / p.gram(i, i) - 1e-6);
      }
    }
    CHECK(sol.w.minCoeff() >= 0.0);
  }
}

TEST_CASE("objective scaling leaves the step and decrease unchanged") {
  // scaling every f_i by c scales delta by c and the gram by c^2; the
  // optimal update J w and the guaranteed decrease stay fixed
  auto rng = make_rng(88);
  for (int t = 0; t < 20; ++t) {
    const WeightSubproblem p = random_instance(2, rng);
    const double c = 3.0;
    WeightSubproblem scaled;
    scaled.delta = c * p.delta;
    scaled.gram = c * c * p.gram;
    const auto sol = solve_nonneg_qp(p);
    const auto sol_scaled = solve_nonneg_qp(scaled);
    CHECK(sol_scaled.value == doctest::Approx(sol.value).epsilon(1e-6));
    // w scales by 1/c, so the update J_scaled w_scaled = c J (w/c) matches
    CHECK((c * sol_scaled.w).isApprox(sol.w, 1e-5));
  }
}

TEST_CASE("zero-curvature guard drops kink directions") {
  WeightSubproblem p;
  p.delta = (Point(2) << 1.0, 0.5).finished();
  p.gram = Matrix::Zero(2, 2);
  p.gram(1, 1) = 1.0;
  const auto sol = solve_nonneg_qp(p);
  CHECK(sol.dropped_indices == std::vector<int>{0});
  CHECK(sol.w[0] == 0.0);
  CHECK(sol.w[1] == doctest::Approx(0.5));

  WeightSubproblem degenerate;
  degenerate.delta = Point::Constant(1, 1.0);
  degenerate.gram = Matrix::Zero(1, 1);
  const auto d = solve_nonneg_qp(degenerate);
  CHECK(d.dropped_indices == std::vector<int>{0});
  CHECK(d.w[0] == 0.0);
}

TEST_CASE("support restriction pins excluded weights at zero") {
  WeightSubproblem p;
  p.delta = (Point(3) << 1.0, 0.8, 0.6).finished();
  p.gram = Matrix::Identity(3, 3);
  const std::vector<int> support = {0, 2};
  const auto sol = solve_nonneg_qp(p, 1e-10, 10000, &support);
  CHECK(sol.w[1] == 0.0);
  CHECK(sol.w[0] == doctest::Approx(1.0));
  CHECK(sol.w[2] == doctest::Approx(0.6));
}
