#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "amoo/core.hpp"
#include "amoo/problems.hpp"

using namespace amoo;

namespace {

Objective quadratic_1d() {
  Objective obj;
  obj.name = "x^2";
  obj.value = [](const Point& x) { return x[0] * x[0]; };
  obj.gradient = [](const Point& x) { return Point::Constant(1, 2 * x[0]); };
  obj.optimal_value = 0.0;
  return obj;
}

Objective abs_1d() {
  Objective obj;
  obj.name = "|x|";
  obj.value = [](const Point& x) { return std::abs(x[0]); };
  obj.gradient = [](const Point& x) {
    return Point::Constant(1, x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0));
  };
  obj.optimal_value = 0.0;
  return obj;
}

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

ObjectiveSet gap_set(std::initializer_list<double> gaps) {
  // constant objectives whose gaps at any point equal the given values
  ObjectiveSet f;
  f.dimension = 1;
  for (double g : gaps) {
    Objective obj;
    obj.value = [g](const Point&) { return g; };
    obj.gradient = [](const Point&) { return Point::Zero(1); };
    obj.optimal_value = 0.0;
    f.objectives.push_back(std::move(obj));
  }
  return f;
}

}  // namespace

TEST_CASE("max_gap on simple pairs") {
  ObjectiveSet f;
  f.dimension = 1;
  f.objectives.push_back(quadratic_1d());
  f.objectives.push_back(abs_1d());
  CHECK(max_gap(f, pt({0.0})) == doctest::Approx(0.0));

  ObjectiveSet g;
  g.dimension = 1;
  g.objectives.push_back(quadratic_1d());
  Objective quartic;
  quartic.value = [](const Point& x) { return std::pow(x[0], 4); };
  quartic.gradient = [](const Point& x) {
    return Point::Constant(1, 4 * std::pow(x[0], 3));
  };
  quartic.optimal_value = 0.0;
  g.objectives.push_back(std::move(quartic));
  CHECK(max_gap(g, pt({2.0})) == doctest::Approx(16.0));
}

TEST_CASE("max_gap on the worst-case start point") {
  const auto p = make_lower_bound_problem(4, 4, 1.0);
  CHECK(max_gap(p.objectives, pt({3, 1, 1, 1})) == doctest::Approx(3.0));
  CHECK(select_max_gap_index(p.objectives, pt({3, 1, 1, 1})) == 0);
}

TEST_CASE("max_gap errors") {
  ObjectiveSet f;
  f.dimension = 2;
  f.objectives.push_back(quadratic_1d());
  CHECK_THROWS_AS(max_gap(f, pt({1.0})), ConfigError);

  ObjectiveSet bad;
  bad.dimension = 1;
  Objective nan_obj;
  nan_obj.value = [](const Point&) { return std::nan(""); };
  nan_obj.gradient = [](const Point&) { return Point::Zero(1); };
  bad.objectives.push_back(std::move(nan_obj));
  CHECK_THROWS_AS(max_gap(bad, pt({1.0})), NumericError);

  ObjectiveSet below;
  below.dimension = 1;
  Objective wrong_fstar = quadratic_1d();
  wrong_fstar.optimal_value = 1.0;  // claims min 1 but f(0) = 0
  below.objectives.push_back(std::move(wrong_fstar));
  CHECK_THROWS_AS(max_gap(below, pt({0.0})), NumericError);
}

TEST_CASE("select_max_gap_index tie-break and argmax") {
  CHECK(select_max_gap_index(gap_set({0.5, 0.5, 0.1}), pt({0.0})) == 0);
  CHECK(select_max_gap_index(gap_set({0.1, 0.9, 0.3}), pt({0.0})) == 1);
}

TEST_CASE("average_iterate") {
  Trajectory traj;
  traj.iterates.push_back(pt({0, 0}));
  CHECK(average_iterate(traj).isApprox(pt({0, 0})));

  traj.iterates = {pt({2, 0}), pt({0, 2})};
  CHECK(average_iterate(traj).isApprox(pt({1, 1})));

  traj.iterates = {pt({3, 1, 1, 1}), pt({1.5, -0.5, -0.5, -0.5})};
  CHECK(average_iterate(traj).isApprox(pt({2.25, 0.25, 0.25, 0.25})));

  Trajectory empty;
  CHECK_THROWS_AS(average_iterate(empty), UsageError);
}

TEST_CASE("average of a constant trajectory is exact") {
  Trajectory traj;
  const Point x = pt({0.1, -0.7, 3.3});
  for (int i = 0; i < 7; ++i) traj.iterates.push_back(x);
  const Point avg = average_iterate(traj);
  for (int j = 0; j < 3; ++j) CHECK(avg[j] == x[j]);
}

TEST_CASE("epsilon set membership") {
  auto p = make_lower_bound_problem(2, 2, 1.0);
  CHECK(is_in_epsilon_set(p.objectives, pt({0.0, 0.0}), 0.0));
  CHECK(is_in_epsilon_set(p.objectives, pt({0.04, -0.03}), 0.05));
  CHECK_FALSE(is_in_epsilon_set(p.objectives, pt({0.04, -0.03}), 0.02));
  CHECK_THROWS_AS(is_in_epsilon_set(p.objectives, pt({0, 0}), -1.0), UsageError);
}

TEST_CASE("membership/metric duality on random points") {
  auto p = make_lower_bound_problem(5, 8, 0.5);
  auto rng = make_rng(42);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> eps(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    Point x(8);
    for (int j = 0; j < 8; ++j) x[j] = coord(rng);
    const double e = eps(rng);
    CHECK(is_in_epsilon_set(p.objectives, x, e) ==
          (max_gap(p.objectives, x) <= e));
  }
}

TEST_CASE("argmax gap is consistent with max_gap") {
  auto p = make_lower_bound_problem(6, 6, 0.3);
  auto rng = make_rng(43);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    Point x(6);
    for (int j = 0; j < 6; ++j) x[j] = coord(rng);
    const int i = select_max_gap_index(p.objectives, x);
    const double gap = p.objectives.objectives[i].value(x) -
                       p.objectives.objectives[i].optimal_value;
    CHECK(gap == doctest::Approx(max_gap(p.objectives, x)).epsilon(1e-12));
  }
}

TEST_CASE("permuting objectives permutes the argmax and fixes the max") {
  auto p = make_lower_bound_problem(4, 4, 1.0);
  auto rng = make_rng(44);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);

  ObjectiveSet rotated;
  rotated.dimension = 4;
  const int m = 4;
  for (int i = 0; i < m; ++i) {
    rotated.objectives.push_back(p.objectives.objectives[(i + 1) % m]);
  }
  for (int t = 0; t < 50; ++t) {
    Point x(4);
    for (int j = 0; j < 4; ++j) x[j] = coord(rng);
    CHECK(max_gap(p.objectives, x) == doctest::Approx(max_gap(rotated, x)));
    // unique-argmax points map through the rotation
    const int orig = select_max_gap_index(p.objectives, x);
    bool unique = true;
    for (int i = 0; i < m; ++i) {
      if (i != orig &&
          std::abs(objective_gap(p.objectives.objectives[i], x) -
                   objective_gap(p.objectives.objectives[orig], x)) < 1e-12) {
        unique = false;
      }
    }
    if (unique) {
      CHECK((select_max_gap_index(rotated, x) + 1) % m == orig);
    }
  }
}

TEST_CASE("prefix average matches slices") {
  Trajectory traj;
  traj.iterates = {pt({1, 0}), pt({3, 2}), pt({5, 4})};
  CHECK(prefix_average(traj, 1).isApprox(pt({1, 0})));
  CHECK(prefix_average(traj, 2).isApprox(pt({2, 1})));
  CHECK(prefix_average(traj, 3).isApprox(pt({3, 2})));
  CHECK_THROWS_AS(prefix_average(traj, 4), UsageError);
}
