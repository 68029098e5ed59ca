#ifndef AMOO_CONFIG_HPP
#define AMOO_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amoo/core.hpp"

// Flat key-value experiment configuration:
//
//   [problem]            one per file
//   family = lower_bound
//   m = 16
//
//   [run <id>]           one or more
//   algorithm = ew_polyak
//   iterations = 16
//
//   [output]             optional
//   directory = out
//
// '#' starts a comment. Unknown keys and malformed lines are rejected with
// line:column diagnostics. serialize_config emits the canonical form, which
// parses back to an identical configuration.

namespace amoo {

struct ProblemSpec {
  std::string family;  // lower_bound | piecewise_linear | quadratic |
                       // epsilon_shifted | power_quadratic | distillation
  std::optional<int> m, n;
  std::optional<double> eps_param;
  std::optional<std::uint64_t> seed;
  std::optional<int> shared_null;
  std::optional<double> delta;
  std::optional<double> alignment_epsilon;
  std::optional<std::string> preset;  // p1 | p2 | p3
  std::optional<int> d_i, hidden, d_o, batches, batch_size;
  std::optional<double> start_scale;
  // Testing aid: shifts every recorded f_i* by this amount to exercise the
  // verdict-failure paths.
  std::optional<double> fstar_shift;
};

struct RunSpec {
  std::string id;
  std::string algorithm;
  int iterations = 1;
  double epsilon = 0.0;
  std::optional<double> momentum;
  std::optional<double> gd_step;
  std::optional<double> ogd_distance;
  std::optional<double> ew_fstar;
  bool stop_on_epsilon = false;
  bool check_bounds = true;
};

struct OutputSpec {
  std::string directory = "amoo_out";
  bool csv = true;
  bool json = false;
  bool svg = false;
  std::optional<int> threads;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<RunSpec> runs;
  OutputSpec output;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization; stable across platforms.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace amoo

#endif
