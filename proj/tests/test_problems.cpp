#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "amoo/nets.hpp"
#include "amoo/problems.hpp"

using namespace amoo;

namespace {

Point random_point(int n, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("lower-bound problem construction") {
  const auto p = make_lower_bound_problem(4, 4, 1.0);
  CHECK(p.a == doctest::Approx(3.0));
  CHECK(p.start.isApprox((Point(4) << 3, 1, 1, 1).finished()));
  for (const Objective& obj : p.objectives.objectives) {
    CHECK(obj.optimal_value == 0.0);
    CHECK(*obj.lipschitz_bound == 1.0);
  }

  const auto q = make_lower_bound_problem(2, 2, 1.0);
  CHECK(q.start.isApprox((Point(2) << 1, 1).finished()));

  const auto r = make_lower_bound_problem(16, 20, 0.1);
  CHECK(r.a == doctest::Approx(1.5));
  for (int j = 16; j < 20; ++j) CHECK(r.start[j] == 0.0);

  CHECK_THROWS_AS(make_lower_bound_problem(4, 3, 1.0), ConfigError);
  CHECK_THROWS_AS(make_lower_bound_problem(4, 4, 0.0), ConfigError);
}

TEST_CASE("closed forms of the worst-case iterates") {
  CHECK(closed_form_first_coordinate(4, 3.0, 1) == doctest::Approx(3.0));
  CHECK(closed_form_first_coordinate(4, 3.0, 2) == doctest::Approx(1.5));
  CHECK(closed_form_first_coordinate(2, 1.0, 2) == doctest::Approx(0.0));
  CHECK(closed_form_other_coordinate(4, 1.0, 2) == doctest::Approx(-0.5));
  CHECK(closed_form_other_coordinate(4, 1.0, 3) == doctest::Approx(0.25));
}

TEST_CASE("ew lower bound values") {
  // sqrt(m-1)/3 * G * dist / sqrt(K), computed independently per case
  CHECK(ew_lower_bound_value(10, 1, 1, 9).value == doctest::Approx(1.0 / 3.0));
  CHECK(ew_lower_bound_value(2, 1, 1, 1).value == doctest::Approx(1.0 / 3.0));
  CHECK(ew_lower_bound_value(65, 1, 2, 64).value == doctest::Approx(2.0 / 3.0));
  CHECK(ew_lower_bound_value(10, 1, 1, 9).within_validity);
  CHECK_FALSE(ew_lower_bound_value(10, 1, 1, 11).within_validity);
}

TEST_CASE("power-quadratic values") {
  // identity displacement: f(theta) = ((theta-s)^T H (theta-s))^alpha
  PowerQuadraticLoss loss;
  loss.h_diag = Point::Ones(2);
  loss.alpha = 2.0;
  loss.shift = 0.0;
  CHECK(loss.value(Point::Zero(2)) == doctest::Approx(0.0));
  CHECK(loss.value((Point(2) << 1, 1).finished()) == doctest::Approx(4.0));

  auto set = make_power_quadratic_problem(make_p1_losses(2), 2);
  CHECK(max_gap(set, Point::Zero(2)) == doctest::Approx(0.0));

  PowerQuadraticLoss bad = loss;
  bad.alpha = 0.5;
  CHECK_THROWS_AS(make_power_quadratic_problem({bad}, 2), ConfigError);
}

TEST_CASE("p3 hessian block scaling") {
  // with u_j = 0 the diagonal would be 0.5 / 0.5e-3; u_j ~ U[0,1) keeps each
  // entry within a factor of two of that
  const auto losses = make_p3_losses(100, 5);
  for (const auto& loss : losses) {
    for (int j = 0; j < 10; ++j) {
      CHECK(loss.h_diag[j] >= 0.5);
      CHECK(loss.h_diag[j] < 1.0);
    }
    for (int j = 10; j < 100; ++j) {
      CHECK(loss.h_diag[j] >= 0.5e-3);
      CHECK(loss.h_diag[j] < 1.0e-3);
    }
  }
  CHECK(losses[0].shift == 0.0);
  CHECK(losses[1].shift == 0.01);
  CHECK(losses[2].shift == -0.01);
}

TEST_CASE("power-quadratic nonnegativity and minimum") {
  auto rng = make_rng(7);
  const auto losses = make_p2_losses(3);
  for (const auto& loss : losses) {
    for (int t = 0; t < 50; ++t) {
      CHECK(loss.value(random_point(3, rng)) >= 0.0);
    }
    CHECK(loss.value(Point::Constant(3, loss.shift)) == doctest::Approx(0.0));
  }
}

TEST_CASE("distillation determinism and shapes") {
  const auto p1 = make_distillation_problem(9, 8, 32, 4, 3, 16, make_p1_losses(4));
  const auto p2 = make_distillation_problem(9, 8, 32, 4, 3, 16, make_p1_losses(4));
  CHECK(p1.teacher_theta == p2.teacher_theta);
  CHECK(p1.student_init == p2.student_init);
  CHECK(p1.batches[0] == p2.batches[0]);
  CHECK(p1.net.param_count() == 8 * 32 + 32 + 32 * 4 + 4);

  const auto p3 = make_distillation_problem(10, 8, 32, 4, 3, 16, make_p1_losses(4));
  CHECK(p1.teacher_theta != p3.teacher_theta);

  // displacement vanishes when the student equals the teacher
  CHECK(p1.losses[0].batch_value(p1.displacement(0, p1.teacher_theta)) ==
        doctest::Approx(0.0));
}

TEST_CASE("gradient check on closed-form and sampled objectives") {
  Objective half_norm2;
  half_norm2.value = [](const Point& x) { return 0.5 * x.squaredNorm(); };
  half_norm2.gradient = [](const Point& x) { return x; };
  auto rng = make_rng(12);
  CHECK(gradient_check(half_norm2, random_point(5, rng)) <= 1e-7);

  const auto quad = make_quadratic_family(3, 6, 1, 13);
  for (const Objective& obj : quad.objectives.objectives) {
    CHECK(gradient_check(obj, random_point(6, rng)) <= 1e-6);
  }

  const auto distill =
      make_distillation_problem(21, 4, 8, 3, 2, 16, make_p2_losses(3));
  const auto set = distill.full_objective_set();
  for (const Objective& obj : set.objectives) {
    CHECK(gradient_check(obj, distill.student_init) <= 1e-4);
  }
}

TEST_CASE("smoothness and lipschitz certificates hold on samples") {
  auto rng = make_rng(15);
  const auto quad = make_quadratic_family(4, 8, 2, 99);
  for (const Objective& obj : quad.objectives.objectives) {
    REQUIRE(obj.smoothness_bound.has_value());
    for (int t = 0; t < 100; ++t) {
      const Point x = random_point(8, rng);
      const double lhs = obj.gradient(x).squaredNorm();
      const double rhs =
          2.0 * *obj.smoothness_bound * (obj.value(x) - obj.optimal_value);
      CHECK(lhs <= rhs + 1e-9);
    }
  }

  const auto pl = make_piecewise_linear_family(3, 6, 77);
  for (const Objective& obj : pl.objectives.objectives) {
    REQUIRE(obj.lipschitz_bound.has_value());
    for (int t = 0; t < 100; ++t) {
      CHECK(obj.gradient(random_point(6, rng)).norm() <=
            *obj.lipschitz_bound + 1e-12);
    }
  }
}

TEST_CASE("epsilon-shifted family geometry") {
  const auto fam = make_epsilon_shifted_family(3, 6, 0.03, 0.05);
  CHECK(fam.objectives.alignment_epsilon == 0.05);
  // the origin block is a witness with max gap exactly delta
  CHECK(max_gap(fam.objectives, Point::Zero(6)) == doctest::Approx(0.03));
  // no exact common minimizer: every point has max gap >= delta
  auto rng = make_rng(31);
  for (int t = 0; t < 100; ++t) {
    CHECK(max_gap(fam.objectives, random_point(6, rng)) >= 0.03 - 1e-12);
  }
  CHECK_THROWS_AS(make_epsilon_shifted_family(3, 6, 0.1, 0.05), ConfigError);
}

TEST_CASE("piecewise-linear projection lands on the solution set") {
  const auto pl = make_piecewise_linear_family(3, 8, 5);
  auto rng = make_rng(6);
  for (int t = 0; t < 20; ++t) {
    const Point x = random_point(8, rng);
    const Point proj = pl.objectives.solution_projection(x);
    CHECK(max_gap(pl.objectives, proj) <= 1e-9);
    // projection residual is orthogonal to the solution plane shift
    const Point again = pl.objectives.solution_projection(proj);
    CHECK((again - proj).norm() <= 1e-9);
  }
}

TEST_CASE("dataset cache round-trips") {
  Matrix m(3, 2);
  m << 1.5, -2.25, 3.0, 0.125, -7.5, 42.0;
  const std::string path = "test_dataset_cache.bin";
  write_matrix(path, m);
  const Matrix back = read_matrix(path);
  CHECK(back == m);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_matrix("does_not_exist.bin"), UsageError);
}
