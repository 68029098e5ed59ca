#ifndef AMOO_RUNNER_HPP
#define AMOO_RUNNER_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "amoo/analysis.hpp"
#include "amoo/config.hpp"

// Experiment orchestration: builds problems from config specs, fans
// independent runs out to a bounded worker pool, merges results in run-id
// order and emits CSV/JSON/SVG reports.

namespace amoo {

struct BuiltProblem {
  ObjectiveSet objectives;
  Point start;
  std::string description;
};

BuiltProblem build_problem(const ProblemSpec& spec);

RunConfig to_run_config(const RunSpec& spec);

// Bound kinds checked by default for each algorithm, given the constants
// the problem actually carries.
std::vector<BoundKind> default_bound_kinds(Algorithm a, const BoundConstants& c);

// Runs every job on `threads` workers (order of execution unspecified,
// results must be written to pre-allocated slots). Rethrows the first
// failure in submission order.
void run_parallel(const std::vector<std::function<void()>>& jobs, int threads);

// Worker count: config value, else AMOO_THREADS, else hardware concurrency.
int worker_count(std::optional<int> configured);

// Exit statuses: 0 all verdicts pass, 1 run failure or failed verdict,
// 2 malformed config / unknown subcommand.
int run_experiment(const std::string& config_path, std::ostream& out);
int reproduce(const std::string& name, const std::string& out_dir,
              std::ostream& out);
int list_problems(std::ostream& out);

}  // namespace amoo

#endif
