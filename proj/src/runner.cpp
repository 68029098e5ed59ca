#include "amoo/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <thread>

#include "amoo/experiments.hpp"
#include "amoo/nets.hpp"
#include "amoo/problems.hpp"
#include "amoo/results.hpp"
#include "amoo/svg.hpp"

namespace amoo {

namespace fs = std::filesystem;

namespace {

Point seeded_start(int n, std::uint64_t seed, double scale) {
  auto rng = make_rng(seed, 99);
  std::uniform_real_distribution<double> u(-scale, scale);
  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

int require(const std::optional<int>& v, const char* key) {
  if (!v) throw ConfigError(std::string("problem needs '") + key + "'");
  return *v;
}

std::vector<PowerQuadraticLoss> preset_losses(const std::string& preset,
                                              int d_o, std::uint64_t seed) {
  if (preset == "p1") return make_p1_losses(d_o);
  if (preset == "p2") return make_p2_losses(d_o);
  if (preset == "p3") return make_p3_losses(d_o, seed);
  throw ConfigError("unknown preset '" + preset + "' (use p1, p2 or p3)");
}

}  // namespace

BuiltProblem build_problem(const ProblemSpec& spec) {
  BuiltProblem built;
  const std::uint64_t seed = spec.seed.value_or(1);
  const double start_scale = spec.start_scale.value_or(2.0);

  if (spec.family == "lower_bound") {
    auto p = make_lower_bound_problem(require(spec.m, "m"), require(spec.n, "n"),
                                      spec.eps_param.value_or(1.0));
    built.objectives = std::move(p.objectives);
    built.start = std::move(p.start);
    built.description = "absolute-coordinate worst case, m=" + std::to_string(p.m);
  } else if (spec.family == "piecewise_linear") {
    auto p = make_piecewise_linear_family(require(spec.m, "m"),
                                          require(spec.n, "n"), seed);
    built.objectives = std::move(p.objectives);
    built.start = seeded_start(require(spec.n, "n"), seed, start_scale);
    built.description = "piecewise-linear Lipschitz family";
  } else if (spec.family == "quadratic") {
    auto p = make_quadratic_family(require(spec.m, "m"), require(spec.n, "n"),
                                   spec.shared_null.value_or(0), seed);
    built.objectives = std::move(p.objectives);
    built.start = seeded_start(require(spec.n, "n"), seed, start_scale);
    built.description = "aligned diagonal quadratics";
  } else if (spec.family == "epsilon_shifted") {
    if (!spec.delta || !spec.alignment_epsilon) {
      throw ConfigError("epsilon_shifted needs 'delta' and 'alignment_epsilon'");
    }
    auto p = make_epsilon_shifted_family(require(spec.m, "m"),
                                         require(spec.n, "n"), *spec.delta,
                                         *spec.alignment_epsilon);
    built.objectives = std::move(p.objectives);
    built.start = seeded_start(require(spec.n, "n"), seed, start_scale);
    built.description = "approximately aligned shifted family";
  } else if (spec.family == "power_quadratic") {
    const int d_o = require(spec.d_o, "d_o");
    built.objectives = make_power_quadratic_problem(
        preset_losses(spec.preset.value_or("p1"), d_o, seed), d_o);
    built.start = seeded_start(d_o, seed, start_scale);
    built.description = "power-quadratic losses, identity displacement";
  } else if (spec.family == "distillation") {
    const int d_o = spec.d_o.value_or(4);
    auto p = make_distillation_problem(
        seed, spec.d_i.value_or(8), spec.hidden.value_or(32), d_o,
        spec.batches.value_or(20), spec.batch_size.value_or(64),
        preset_losses(spec.preset.value_or("p1"), d_o, seed));
    built.objectives = p.full_objective_set();
    built.start = p.student_init;
    built.description = "two-layer network distillation";
  } else {
    throw ConfigError("unknown problem family '" + spec.family + "'");
  }

  if (spec.fstar_shift && *spec.fstar_shift != 0.0) {
    for (Objective& obj : built.objectives.objectives) {
      obj.optimal_value += *spec.fstar_shift;
    }
  }
  return built;
}

RunConfig to_run_config(const RunSpec& spec) {
  RunConfig cfg;
  const auto algo = algorithm_from_name(spec.algorithm);
  if (!algo) throw ConfigError("unknown algorithm '" + spec.algorithm + "'");
  cfg.algorithm = *algo;
  cfg.iterations = spec.iterations;
  cfg.epsilon = spec.epsilon;
  cfg.momentum = spec.momentum;
  cfg.gd_step = spec.gd_step;
  cfg.ogd_distance_estimate = spec.ogd_distance;
  cfg.ew_optimal_value = spec.ew_fstar;
  cfg.stop_on_epsilon = spec.stop_on_epsilon;
  cfg.validate();
  return cfg;
}

std::vector<BoundKind> default_bound_kinds(Algorithm a,
                                           const BoundConstants& c) {
  std::vector<BoundKind> kinds;
  switch (a) {
    case Algorithm::EwPolyak:
      if (c.lipschitz) kinds.push_back(BoundKind::EwLower);
      break;
    case Algorithm::Pamoo:
      if (c.lipschitz) kinds.push_back(BoundKind::PamooUpper);
      else if (c.smoothness) kinds.push_back(BoundKind::Smooth);
      break;
    case Algorithm::MgamooPolyak:
    case Algorithm::MgamooOgd:
      if (c.lipschitz) kinds.push_back(BoundKind::MgamooLipschitz);
      break;
    case Algorithm::MgamooGd:
      if (c.smoothness) kinds.push_back(BoundKind::Smooth);
      break;
    case Algorithm::EwGd:
      break;
  }
  return kinds;
}

void run_parallel(const std::vector<std::function<void()>>& jobs, int threads) {
  if (jobs.empty()) return;
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int worker_count(std::optional<int> configured) {
  if (configured && *configured > 0) return *configured;
  if (const char* env = std::getenv("AMOO_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct RunOutcome {
  ResultRecord record;
  bool has_report = false;
  BoundReport report;
  std::string error;
};

void emit_outputs(const ExperimentConfig& cfg, const std::string& out_dir,
                  const std::vector<ResultRecord>& records, std::ostream& out) {
  fs::create_directories(out_dir);
  if (cfg.output.csv) {
    write_file_atomic(out_dir + "/results.csv", to_csv(records));
    write_file_atomic(out_dir + "/bounds.csv", bound_report_csv(records));
    out << "wrote " << out_dir << "/results.csv\n";
  }
  if (cfg.output.json) {
    write_file_atomic(out_dir + "/results.json", to_json(records));
    out << "wrote " << out_dir << "/results.json\n";
  }
  if (cfg.output.svg) {
    std::vector<SvgSeries> series;
    for (const ResultRecord& rec : records) {
      SvgSeries s;
      s.label = rec.run_id;
      for (const ResultRow& row : rec.rows) {
        s.x.push_back(row.k);
        s.y.push_back(row.mg_xbar_k);
      }
      series.push_back(std::move(s));
    }
    write_file_atomic(out_dir + "/convergence.svg",
                      render_loglog_svg("max gap of the average iterate", "k",
                                        "MG(avg x_1..x_k)", series));
    out << "wrote " << out_dir << "/convergence.svg\n";
  }
}

}  // namespace

int run_experiment(const std::string& config_path, std::ostream& out) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
    return 2;
  }

  BuiltProblem problem;
  try {
    problem = build_problem(cfg.problem);
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::uint64_t hash = config_hash(cfg);
  std::vector<RunOutcome> outcomes(cfg.runs.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    jobs.push_back([&, i] {
      const RunSpec& spec = cfg.runs[i];
      RunOutcome& o = outcomes[i];
      try {
        const RunConfig rc = to_run_config(spec);
        const Trajectory traj = run_algorithm(problem.objectives, problem.start, rc);
        if (spec.check_bounds && problem.objectives.solution_projection) {
          const BoundConstants constants =
              derive_constants(problem.objectives, problem.start, rc.epsilon);
          const auto kinds = default_bound_kinds(rc.algorithm, constants);
          if (!kinds.empty()) {
            o.report = check_run_against_bounds(traj, problem.objectives,
                                                constants, kinds);
            o.has_report = true;
          }
        }
        o.record = make_result_record(spec.id, hash, traj, problem.objectives,
                                      o.has_report ? &o.report : nullptr);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    });
  }
  run_parallel(jobs, worker_count(cfg.output.threads));

  bool all_pass = true;
  std::vector<ResultRecord> records;
  out << problem.description << "\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const RunOutcome& o = outcomes[i];
    if (!o.error.empty()) {
      out << "run '" << cfg.runs[i].id << "' failed: " << o.error << "\n";
      return 1;
    }
    records.push_back(o.record);
    int passed = 0, failed = 0;
    for (const BoundCheck& c : o.record.verdicts) (c.pass ? passed : failed)++;
    all_pass = all_pass && failed == 0;
    const double final_mg =
        o.record.rows.empty() ? 0.0 : o.record.rows.back().mg_xbar_k;
    out << "  " << std::left << std::setw(16) << o.record.run_id
        << " steps=" << o.record.rows.size() << " MG(x_bar)=" << final_mg;
    if (o.has_report) out << " verdicts: " << passed << " pass, " << failed << " fail";
    if (o.record.stopped_early) out << " (stopped at k=" << o.record.stop_index << ")";
    out << "\n";
  }

  emit_outputs(cfg, cfg.output.directory, records, out);
  out << (all_pass ? "all bound verdicts pass\n" : "bound verdict FAILURES\n");
  return all_pass ? 0 : 1;
}

int list_problems(std::ostream& out) {
  out << "problem families ([problem] section keys):\n"
      << "  lower_bound       m, n, eps_param\n"
      << "  piecewise_linear  m, n, seed\n"
      << "  quadratic         m, n, shared_null, seed\n"
      << "  epsilon_shifted   m, n, delta, alignment_epsilon\n"
      << "  power_quadratic   preset (p1|p2|p3), d_o, seed\n"
      << "  distillation      preset, d_i, hidden, d_o, batches, batch_size, seed\n"
      << "common optional keys: start_scale, fstar_shift\n"
      << "algorithms: ew_polyak ew_gd pamoo mgamoo_polyak mgamoo_gd mgamoo_ogd\n";
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce subcommands

namespace {

int reproduce_lower_bound(const std::string& out_dir, std::ostream& out) {
  const int m = 16, n = 16, K = 16;
  const double eps = 0.1;
  const LowerBoundProblem problem = make_lower_bound_problem(m, n, eps);

  RunConfig ew;
  ew.algorithm = Algorithm::EwPolyak;
  ew.iterations = K;
  const Trajectory traj = ew_polyak_run(problem.objectives, problem.start, ew);

  // iterates must follow the induction closed form exactly
  double worst = 0.0;
  for (int k = 1; k <= K; ++k) {
    const Point& x = traj.iterates[k - 1];
    worst = std::max(worst,
                     std::abs(x[0] - closed_form_first_coordinate(m, problem.a, k)));
    for (int i = 1; i < m; ++i) {
      worst = std::max(worst,
                       std::abs(x[i] - closed_form_other_coordinate(m, eps, k)));
    }
  }
  const bool closed_form_ok = worst <= 1e-10;
  out << "closed-form max deviation: " << worst
      << (closed_form_ok ? " (ok)" : " (FAIL)") << "\n";

  const BoundConstants constants =
      derive_constants(problem.objectives, problem.start, 0.0);
  const BoundReport report = check_run_against_bounds(
      traj, problem.objectives, constants, {BoundKind::EwLower});
  for (const BoundCheck& c : report.checks) {
    out << "  k=" << c.k << " MG(x_bar)=" << c.empirical
        << " lower bound=" << c.bound << (c.pass ? " pass" : " FAIL") << "\n";
  }

  RunConfig mg;
  mg.algorithm = Algorithm::MgamooPolyak;
  mg.iterations = K;
  const Trajectory mg_traj = run_algorithm(problem.objectives, problem.start, mg);

  ExperimentConfig cfg;
  cfg.problem.family = "lower_bound";
  cfg.problem.m = m;
  cfg.problem.n = n;
  cfg.problem.eps_param = eps;
  cfg.runs.push_back({"ew_polyak", "ew_polyak", K});
  cfg.runs.push_back({"mgamoo_polyak", "mgamoo_polyak", K});
  cfg.output.directory = out_dir;
  cfg.output.csv = true;
  cfg.output.svg = true;
  const std::uint64_t hash = config_hash(cfg);

  std::vector<ResultRecord> records;
  records.push_back(make_result_record("ew_polyak", hash, traj,
                                       problem.objectives, &report));
  records.push_back(
      make_result_record("mgamoo_polyak", hash, mg_traj, problem.objectives));
  emit_outputs(cfg, out_dir, records, out);

  const bool ok = closed_form_ok && report.all_pass();
  out << (ok ? "lower-bound reproduction ok\n" : "lower-bound reproduction FAILED\n");
  return ok ? 0 : 1;
}

int reproduce_bounds(const std::string& out_dir, std::ostream& out) {
  bool all_ok = true;
  std::vector<ResultRecord> records;
  ExperimentConfig cfg;
  cfg.problem.family = "lower_bound";
  cfg.output.directory = out_dir;
  cfg.output.csv = true;
  cfg.output.svg = true;
  const int K = 256;

  struct Entry {
    std::string id;
    ObjectiveSet objectives;
    Point start;
    Algorithm algorithm;
  };
  std::vector<Entry> entries;

  const LowerBoundProblem lb = make_lower_bound_problem(16, 16, 0.1);
  entries.push_back({"pamoo_lb", lb.objectives, lb.start, Algorithm::Pamoo});
  entries.push_back({"mgamoo_polyak_lb", lb.objectives, lb.start,
                     Algorithm::MgamooPolyak});
  entries.push_back({"mgamoo_ogd_lb", lb.objectives, lb.start,
                     Algorithm::MgamooOgd});

  const PiecewiseLinearFamily pl = make_piecewise_linear_family(3, 8, 7);
  const Point pl_start = seeded_start(8, 7, 2.0);
  entries.push_back({"pamoo_pl", pl.objectives, pl_start, Algorithm::Pamoo});
  entries.push_back({"mgamoo_polyak_pl", pl.objectives, pl_start,
                     Algorithm::MgamooPolyak});
  entries.push_back({"mgamoo_ogd_pl", pl.objectives, pl_start,
                     Algorithm::MgamooOgd});

  const QuadraticFamily quad = make_quadratic_family(3, 10, 2, 7);
  entries.push_back({"mgamoo_gd_quad", quad.objectives, seeded_start(10, 7, 2.0),
                     Algorithm::MgamooGd});

  for (const Entry& e : entries) {
    RunConfig rc;
    rc.algorithm = e.algorithm;
    rc.iterations = K;
    const Trajectory traj = run_algorithm(e.objectives, e.start, rc);
    const BoundConstants constants = derive_constants(e.objectives, e.start, 0.0);
    const BoundReport report = check_run_against_bounds(
        traj, e.objectives, constants, default_bound_kinds(e.algorithm, constants));
    all_ok = all_ok && report.all_pass();
    out << "  " << std::left << std::setw(20) << e.id
        << (report.all_pass() ? " pass" : " FAIL") << "\n";
    records.push_back(make_result_record(e.id, config_hash(cfg), traj,
                                         e.objectives, &report));
    cfg.runs.push_back({e.id, algorithm_name(e.algorithm), K});
  }

  emit_outputs(cfg, out_dir, records, out);
  out << (all_ok ? "bound suite ok\n" : "bound suite FAILED\n");
  return all_ok ? 0 : 1;
}

int reproduce_p(const std::string& name, const std::string& out_dir,
                std::ostream& out) {
  const int seeds = 5, iterations = 2000;
  int d_i = 8, d_o = 4;
  if (name == "p3") {
    d_i = 32;
    d_o = 16;
  }
  const int hidden = 32, batches = 20, batch_size = 64;
  const double lr = (name == "p3") ? 0.02 : 0.05;

  struct ConfigEntry {
    std::string label;
    BackendConfig cfg;
  };
  std::vector<ConfigEntry> configs = {
      {"ew", {WeightRule::EqualWeights, false, 0.95, lr, iterations}},
      {"pamoo", {WeightRule::WeightQp, false, 0.95, lr, iterations}},
      {"mgamoo_polyak", {WeightRule::MaxGapPolyak, false, 0.95, lr, iterations}},
      {"mgamoo_polyak_mom", {WeightRule::MaxGapPolyak, true, 0.95, lr, iterations}},
  };

  std::vector<std::vector<BackendResult>> results(
      configs.size(), std::vector<BackendResult>(seeds));
  std::vector<std::function<void()>> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (int s = 0; s < seeds; ++s) {
      jobs.push_back([&, c, s] {
        auto problem = make_distillation_problem(
            1000 + s, d_i, hidden, d_o, batches, batch_size,
            preset_losses(name, d_o, 1000 + s));
        results[c][s] = sgd_backend_run(problem, configs[c].cfg);
      });
    }
  }
  run_parallel(jobs, worker_count(std::nullopt));

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::vector<SvgSeries> series;
  std::string csv = "config,k,median_max_loss\n";
  std::vector<double> final_medians;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    SvgSeries s;
    s.label = configs[c].label;
    const auto& steps = results[c][0].recorded_steps;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      std::vector<double> vals;
      for (int sd = 0; sd < seeds; ++sd) {
        vals.push_back(results[c][sd].max_batch_loss[t]);
      }
      const double med = median(vals);
      s.x.push_back(steps[t]);
      s.y.push_back(med);
      csv += configs[c].label + "," + std::to_string(steps[t]) + "," +
             format_g17(med) + "\n";
    }
    std::vector<double> finals;
    for (int sd = 0; sd < seeds; ++sd) {
      finals.push_back(results[c][sd].final_max_loss);
    }
    final_medians.push_back(median(finals));
    series.push_back(std::move(s));
    out << "  " << std::left << std::setw(20) << configs[c].label
        << " median final max loss = " << final_medians.back() << "\n";
  }

  fs::create_directories(out_dir);
  write_file_atomic(out_dir + "/" + name + "_losses.csv", csv);
  write_file_atomic(out_dir + "/" + name + "_convergence.svg",
                    render_loglog_svg(name + " max objective loss (median of 5 seeds)",
                                      "iteration", "max_i f_i", series));
  out << "wrote " << out_dir << "/" << name << "_losses.csv\n";

  const bool ok = final_medians[3] <= final_medians[0] &&
                  final_medians[1] <= final_medians[0];
  out << (ok ? name + " ordering ok (mgamoo+momentum <= ew, pamoo <= ew)\n"
             : name + " ordering FAILED\n");
  return ok ? 0 : 1;
}

int reproduce_throughput(const std::string& out_dir, std::ostream& out) {
  const int n = 10000;
  const ObjectiveSet problem =
      make_power_quadratic_problem(make_p1_losses(n), n);
  const Point start = seeded_start(n, 3, 0.5);

  std::vector<RunConfig> algorithms;
  RunConfig base;
  base.iterations = 64;
  base.algorithm = Algorithm::EwPolyak;
  algorithms.push_back(base);
  base.algorithm = Algorithm::Pamoo;
  algorithms.push_back(base);
  base.algorithm = Algorithm::MgamooPolyak;
  algorithms.push_back(base);
  base.algorithm = Algorithm::MgamooGd;
  base.gd_step = 1e-3;
  algorithms.push_back(base);

  const auto records = measure_throughput(problem, start, algorithms, 0.2, 1.0);
  std::string csv = "algorithm,iterations_per_second,ratio_vs_ew\n";
  for (const ThroughputRecord& r : records) {
    out << "  " << std::left << std::setw(16) << r.algorithm << " "
        << std::fixed << std::setprecision(0) << r.iterations_per_second
        << " it/s  ratio " << std::setprecision(3) << r.ratio_vs_ew << "\n";
    out.unsetf(std::ios::fixed);
    csv += r.algorithm + "," + format_g17(r.iterations_per_second) + "," +
           format_g17(r.ratio_vs_ew) + "\n";
  }
  fs::create_directories(out_dir);
  write_file_atomic(out_dir + "/throughput.csv", csv);
  out << "wrote " << out_dir << "/throughput.csv\n";

  const bool ok = records[1].ratio_vs_ew <= 0.5 && records[2].ratio_vs_ew >= 0.7;
  out << (ok ? "throughput ordering ok (pamoo <= 0.5x ew, mgamoo >= 0.7x ew)\n"
             : "throughput ordering FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int reproduce(const std::string& name, const std::string& out_dir,
              std::ostream& out) {
  const std::string dir = out_dir.empty() ? ("amoo_out/" + name) : out_dir;
  if (name == "lower-bound") return reproduce_lower_bound(dir, out);
  if (name == "bounds") return reproduce_bounds(dir, out);
  if (name == "p1" || name == "p2" || name == "p3") return reproduce_p(name, dir, out);
  if (name == "throughput") return reproduce_throughput(dir, out);
  out << "unknown reproduce target '" << name
      << "' (use lower-bound, bounds, p1, p2, p3 or throughput)\n";
  return 2;
}

}  // namespace amoo
