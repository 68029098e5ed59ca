#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "amoo/results.hpp"
#include "amoo/runner.hpp"
#include "amoo/svg.hpp"

using namespace amoo;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(# worst-case family demo
[problem]
family = lower_bound
m = 8
n = 8
eps_param = 0.5

[run ew]
algorithm = ew_polyak
iterations = 8

[run qp]
algorithm = pamoo
iterations = 32

[output]
directory = OUTDIR
csv = true
json = true
svg = true
)";

std::string sample_config(const std::string& out_dir) {
  std::string text = kSampleConfig;
  text.replace(text.find("OUTDIR"), 6, out_dir);
  return text;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "amoo_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << content;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round-trips through its canonical form") {
  const ExperimentConfig cfg = parse_config(sample_config("out"));
  const std::string canonical = serialize_config(cfg);
  const ExperimentConfig again = parse_config(canonical);
  CHECK(serialize_config(again) == canonical);
  CHECK(config_hash(cfg) == config_hash(again));
  CHECK(cfg.runs.size() == 2);
  CHECK(cfg.runs[0].id == "ew");
  CHECK(cfg.runs[1].iterations == 32);
}

TEST_CASE("config rejects unknown keys with position info") {
  try {
    parse_config("[problem]\nfamily = lower_bound\nm = 4\nn = 4\nbogus = 1\n"
                 "[run a]\nalgorithm = pamoo\niterations = 4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("config:5:") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[problem]\nm = 4\n"), ConfigError);  // no family
  CHECK_THROWS_AS(parse_config("[run a]\nalgorithm = pamoo\niterations = 1\n"),
                  ConfigError);  // no problem section
  CHECK_THROWS_AS(parse_config("[problem]\nfamily = lower_bound\nnonsense\n"),
                  ConfigError);  // not key = value
  CHECK_THROWS_AS(
      parse_config("[problem]\nfamily = lower_bound\nm = four\n"
                   "[run a]\nalgorithm = pamoo\niterations = 1\n"),
      ConfigError);  // bad integer
}

TEST_CASE("config hash is stable") {
  ExperimentConfig cfg;
  cfg.problem.family = "lower_bound";
  cfg.problem.m = 4;
  cfg.problem.n = 4;
  cfg.runs.push_back({"a", "pamoo", 4});
  // frozen value: guards cross-platform stability of serialized hashing
  CHECK(config_hash(cfg) == 7433293373123940446ULL);
}

TEST_CASE("float formatting round-trips 64-bit values") {
  for (double v : {1.0 / 3.0, 1e-17, 123456789.123456789, -0.1}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
}

TEST_CASE("run_experiment writes outputs and succeeds") {
  const fs::path out_dir = fs::temp_directory_path() / "amoo_cli_test" / "run1";
  fs::remove_all(out_dir);
  const std::string cfg_path =
      write_temp("ok.cfg", sample_config(out_dir.string()));

  std::ostringstream log;
  const int status = run_experiment(cfg_path, log);
  CHECK(status == 0);
  CHECK(fs::exists(out_dir / "results.csv"));
  CHECK(fs::exists(out_dir / "results.json"));
  CHECK(fs::exists(out_dir / "convergence.svg"));
  CHECK(fs::exists(out_dir / "bounds.csv"));

  const std::string csv = slurp((out_dir / "results.csv").string());
  CHECK(csv.rfind("run_id,k,mg_xk,mg_xbar_k,step_size,selected_index,w0", 0) == 0);

  // no stray temp files from the atomic writes
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    CHECK(entry.path().string().find(".tmp.") == std::string::npos);
  }

  // byte-identical on a second run
  const std::string first = slurp((out_dir / "results.csv").string());
  std::ostringstream log2;
  CHECK(run_experiment(cfg_path, log2) == 0);
  CHECK(slurp((out_dir / "results.csv").string()) == first);
}

TEST_CASE("run_experiment failure modes") {
  std::ostringstream log;
  CHECK(run_experiment("no_such_file.cfg", log) == 2);

  const std::string bad = write_temp("bad.cfg", "[problem]\nfamily = lower_bound\n");
  CHECK(run_experiment(bad, log) == 2);

  // a deliberately wrong f* makes the verdicts fail
  const fs::path out_dir = fs::temp_directory_path() / "amoo_cli_test" / "fault";
  std::string faulty = sample_config(out_dir.string());
  faulty.insert(faulty.find("\n[run ew]"), "fstar_shift = -0.25\n");
  const std::string faulty_path = write_temp("fault.cfg", faulty);
  CHECK(run_experiment(faulty_path, log) == 1);
}

TEST_CASE("svg output is self-contained") {
  SvgSeries s;
  s.label = "demo";
  for (int k = 1; k <= 64; ++k) {
    s.x.push_back(k);
    s.y.push_back(1.0 / std::sqrt(static_cast<double>(k)));
  }
  const std::string svg = render_loglog_svg("demo plot", "k", "value", {s});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("slope -1/2") != std::string::npos);
  CHECK(svg.find("slope -1") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);  // no external references
}

TEST_CASE("atomic writes replace the target completely") {
  const fs::path dir = fs::temp_directory_path() / "amoo_cli_test";
  fs::create_directories(dir);
  const std::string path = (dir / "atomic.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(slurp(path) == "second");
  for (const auto& entry : fs::directory_iterator(dir)) {
    CHECK(entry.path().string().find("atomic.txt.tmp") == std::string::npos);
  }
}

TEST_CASE("list problems prints every family") {
  std::ostringstream out;
  CHECK(list_problems(out) == 0);
  for (const char* fam : {"lower_bound", "piecewise_linear", "quadratic",
                          "epsilon_shifted", "power_quadratic", "distillation"}) {
    CHECK(out.str().find(fam) != std::string::npos);
  }
}
