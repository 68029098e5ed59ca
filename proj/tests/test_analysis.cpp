#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amoo/analysis.hpp"
#include "amoo/problems.hpp"

using namespace amoo;

TEST_CASE("bound formula values") {
  CHECK(pamoo_upper_bound(1.0, 1.0, 100) == doctest::Approx(0.1));
  CHECK(mgamoo_lipschitz_bound(1.0, 1.0, 100) == doctest::Approx(0.15));
  CHECK(smooth_bound(1.0, 1.0, 100) == doctest::Approx(0.02));
  CHECK(pamoo_upper_bound(2.0, 3.0, 1) == doctest::Approx(6.0));
  CHECK(pamoo_upper_bound(1.0, 1.0, 100, 0.05) == doctest::Approx(0.15));
  CHECK(smooth_bound(1.0, 1.0, 100, 0.05) == doctest::Approx(0.12));
}

TEST_CASE("bounds are monotone in k and the lower bound in m") {
  for (int k = 1; k < 128; ++k) {
    CHECK(pamoo_upper_bound(1.0, 1.0, k + 1) < pamoo_upper_bound(1.0, 1.0, k));
    CHECK(mgamoo_lipschitz_bound(1.0, 1.0, k + 1) <
          mgamoo_lipschitz_bound(1.0, 1.0, k));
    CHECK(smooth_bound(1.0, 1.0, k + 1) < smooth_bound(1.0, 1.0, k));
    CHECK(ew_lower_bound_value(64, 1.0, 1.0, k + 1).value <
          ew_lower_bound_value(64, 1.0, 1.0, k).value);
  }
  for (int m = 2; m < 128; ++m) {
    CHECK(ew_lower_bound_value(m + 1, 1.0, 1.0, 4).value >
          ew_lower_bound_value(m, 1.0, 1.0, 4).value);
  }
}

TEST_CASE("geometric sum inequality over the grid") {
  for (int m = 2; m <= 128; ++m) {
    for (int K = 1; K <= 128; ++K) {
      CHECK(geometric_sum_inequality_holds(m, K));
    }
  }
}

TEST_CASE("log grid covers endpoints") {
  CHECK(log_grid(1) == std::vector<int>{1});
  CHECK(log_grid(16) == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(log_grid(100) == std::vector<int>{1, 2, 4, 8, 16, 32, 64, 100});
}

TEST_CASE("check_run_against_bounds verdicts") {
  const auto p = make_lower_bound_problem(8, 8, 0.5);

  RunConfig pam;
  pam.algorithm = Algorithm::Pamoo;
  pam.iterations = 64;
  const Trajectory pam_traj = pamoo_run(p.objectives, p.start, pam);
  const BoundConstants c = derive_constants(p.objectives, p.start, 0.0);
  const BoundReport up = check_run_against_bounds(pam_traj, p.objectives, c,
                                                  {BoundKind::PamooUpper});
  CHECK(up.all_pass());

  RunConfig ew;
  ew.algorithm = Algorithm::EwPolyak;
  ew.iterations = 8;
  const Trajectory ew_traj = ew_polyak_run(p.objectives, p.start, ew);
  const BoundReport low = check_run_against_bounds(ew_traj, p.objectives, c,
                                                   {BoundKind::EwLower});
  CHECK(low.all_pass());

  // a constant trajectory at the solution passes every upper bound
  Trajectory constant;
  for (int i = 0; i < 4; ++i) constant.iterates.push_back(Point::Zero(8));
  constant.final_point = Point::Zero(8);
  const BoundReport still = check_run_against_bounds(
      constant, p.objectives, c, {BoundKind::PamooUpper, BoundKind::MgamooLipschitz});
  CHECK(still.all_pass());
  for (const BoundCheck& chk : still.checks) CHECK(chk.empirical == 0.0);
}

TEST_CASE("average gap bound holds on recorded runs") {
  const auto p = make_lower_bound_problem(8, 8, 0.5);
  for (Algorithm a : {Algorithm::EwPolyak, Algorithm::Pamoo,
                      Algorithm::MgamooPolyak, Algorithm::MgamooOgd}) {
    RunConfig cfg;
    cfg.algorithm = a;
    cfg.iterations = 32;
    const Trajectory traj = run_algorithm(p.objectives, p.start, cfg);
    const auto [lhs, rhs] = average_gap_bound(traj, p.objectives);
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("separation between equal weights and the max-gap method") {
  const SeparationResult r = separation_experiment(64, 32);
  CHECK(r.separated);
  CHECK(r.ew_mg > r.mgamoo_mg);
  CHECK(r.ew_mg >= r.ew_lower_bound * (1 - 1e-9));

  // small-m regime: only the two bound verdicts are guaranteed
  const SeparationResult small = separation_experiment(4, 4);
  CHECK(small.ew_mg >= small.ew_lower_bound * (1 - 1e-9));
  CHECK(small.mgamoo_mg <= small.mgamoo_upper_bound * (1 + 1e-9));

  CHECK_THROWS_AS(separation_experiment(4, 8), UsageError);
}

TEST_CASE("throughput measurement is sane and stable") {
  const ObjectiveSet f = make_power_quadratic_problem(make_p1_losses(200), 200);
  Point start = Point::Constant(200, 0.3);

  RunConfig ew;
  ew.algorithm = Algorithm::EwPolyak;
  ew.iterations = 32;
  const auto twice = measure_throughput(f, start, {ew, ew}, 0.05, 0.3);
  REQUIRE(twice.size() == 2);
  CHECK(twice[0].iterations_per_second > 0);
  // same algorithm measured twice: rates within 25% of each other
  CHECK(twice[1].ratio_vs_ew == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("descent violation counter flags a non-descending run") {
  const auto p = make_lower_bound_problem(4, 4, 1.0);
  Trajectory bogus;
  bogus.iterates.push_back(p.start);
  bogus.final_point = 2.0 * p.start;  // moves away from the solution
  bogus.selected_indices.push_back(0);
  bogus.per_step_max_gap.push_back(3.0);
  bogus.step_sizes.push_back(1.0);
  bogus.weights.push_back(WeightVector::Zero(4));
  CHECK(count_descent_violations(bogus, p.objectives, Point::Zero(4)) == 1);
}
