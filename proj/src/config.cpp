#include "amoo/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace amoo {

namespace {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
  int col = 0;
};

struct RawSection {
  std::string kind;  // "problem", "run", "output"
  std::string id;    // run id, empty otherwise
  int line = 0;
  std::vector<KeyValue> entries;
};

[[noreturn]] void fail(int line, int col, const std::string& what) {
  throw ConfigError("config:" + std::to_string(line) + ":" +
                    std::to_string(col) + ": " + what);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<RawSection> parse_raw(const std::string& text) {
  std::vector<RawSection> sections;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const auto hash = raw_line.find('#');
    const std::string work =
        hash == std::string::npos ? raw_line : raw_line.substr(0, hash);
    const std::string line = strip(work);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, static_cast<int>(line.size()), "unterminated section header");
      std::string header = strip(line.substr(1, line.size() - 2));
      RawSection sec;
      sec.line = line_no;
      const auto space = header.find(' ');
      if (space == std::string::npos) {
        sec.kind = header;
      } else {
        sec.kind = header.substr(0, space);
        sec.id = strip(header.substr(space + 1));
      }
      if (sec.kind != "problem" && sec.kind != "run" && sec.kind != "output") {
        fail(line_no, 2, "unknown section '" + sec.kind + "'");
      }
      if (sec.kind == "run" && sec.id.empty()) {
        fail(line_no, 2, "run section needs an id: [run <id>]");
      }
      if (sec.kind != "run" && !sec.id.empty()) {
        fail(line_no, 2, "section '" + sec.kind + "' takes no id");
      }
      sections.push_back(std::move(sec));
      continue;
    }

    const auto eq = work.find('=');
    if (eq == std::string::npos) fail(line_no, 1, "expected 'key = value'");
    if (sections.empty()) fail(line_no, 1, "key outside of any section");
    KeyValue kv;
    kv.key = strip(work.substr(0, eq));
    kv.value = strip(work.substr(eq + 1));
    kv.line = line_no;
    kv.col = static_cast<int>(eq) + 2;
    if (kv.key.empty()) fail(line_no, 1, "empty key");
    if (kv.value.empty()) fail(line_no, kv.col, "empty value");
    sections.back().entries.push_back(std::move(kv));
  }
  return sections;
}

int parse_int(const KeyValue& kv) {
  int v = 0;
  const auto res = std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), v);
  if (res.ec != std::errc() || res.ptr != kv.value.data() + kv.value.size()) {
    fail(kv.line, kv.col, "expected an integer for '" + kv.key + "'");
  }
  return v;
}

std::uint64_t parse_u64(const KeyValue& kv) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), v);
  if (res.ec != std::errc() || res.ptr != kv.value.data() + kv.value.size()) {
    fail(kv.line, kv.col, "expected an unsigned integer for '" + kv.key + "'");
  }
  return v;
}

double parse_double(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    const double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(kv.line, kv.col, "expected a number for '" + kv.key + "'");
  }
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true") return true;
  if (kv.value == "false") return false;
  fail(kv.line, kv.col, "expected true/false for '" + kv.key + "'");
}

ProblemSpec parse_problem(const RawSection& sec) {
  ProblemSpec p;
  for (const KeyValue& kv : sec.entries) {
    if (kv.key == "family") p.family = kv.value;
    else if (kv.key == "m") p.m = parse_int(kv);
    else if (kv.key == "n") p.n = parse_int(kv);
    else if (kv.key == "eps_param") p.eps_param = parse_double(kv);
    else if (kv.key == "seed") p.seed = parse_u64(kv);
    else if (kv.key == "shared_null") p.shared_null = parse_int(kv);
    else if (kv.key == "delta") p.delta = parse_double(kv);
    else if (kv.key == "alignment_epsilon") p.alignment_epsilon = parse_double(kv);
    else if (kv.key == "preset") p.preset = kv.value;
    else if (kv.key == "d_i") p.d_i = parse_int(kv);
    else if (kv.key == "hidden") p.hidden = parse_int(kv);
    else if (kv.key == "d_o") p.d_o = parse_int(kv);
    else if (kv.key == "batches") p.batches = parse_int(kv);
    else if (kv.key == "batch_size") p.batch_size = parse_int(kv);
    else if (kv.key == "start_scale") p.start_scale = parse_double(kv);
    else if (kv.key == "fstar_shift") p.fstar_shift = parse_double(kv);
    else fail(kv.line, 1, "unknown problem key '" + kv.key + "'");
  }
  if (p.family.empty()) fail(sec.line, 1, "problem section needs 'family'");
  return p;
}

RunSpec parse_run(const RawSection& sec) {
  RunSpec r;
  r.id = sec.id;
  bool have_algorithm = false, have_iterations = false;
  for (const KeyValue& kv : sec.entries) {
    if (kv.key == "algorithm") { r.algorithm = kv.value; have_algorithm = true; }
    else if (kv.key == "iterations") { r.iterations = parse_int(kv); have_iterations = true; }
    else if (kv.key == "epsilon") r.epsilon = parse_double(kv);
    else if (kv.key == "momentum") r.momentum = parse_double(kv);
    else if (kv.key == "gd_step") r.gd_step = parse_double(kv);
    else if (kv.key == "ogd_distance") r.ogd_distance = parse_double(kv);
    else if (kv.key == "ew_fstar") r.ew_fstar = parse_double(kv);
    else if (kv.key == "stop_on_epsilon") r.stop_on_epsilon = parse_bool(kv);
    else if (kv.key == "check_bounds") r.check_bounds = parse_bool(kv);
    else fail(kv.line, 1, "unknown run key '" + kv.key + "'");
  }
  if (!have_algorithm) fail(sec.line, 1, "run '" + r.id + "' needs 'algorithm'");
  if (!have_iterations) fail(sec.line, 1, "run '" + r.id + "' needs 'iterations'");
  return r;
}

OutputSpec parse_output(const RawSection& sec) {
  OutputSpec o;
  for (const KeyValue& kv : sec.entries) {
    if (kv.key == "directory") o.directory = kv.value;
    else if (kv.key == "csv") o.csv = parse_bool(kv);
    else if (kv.key == "json") o.json = parse_bool(kv);
    else if (kv.key == "svg") o.svg = parse_bool(kv);
    else if (kv.key == "threads") o.threads = parse_int(kv);
    else fail(kv.line, 1, "unknown output key '" + kv.key + "'");
  }
  return o;
}

void append(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool have_problem = false;
  for (const RawSection& sec : parse_raw(text)) {
    if (sec.kind == "problem") {
      if (have_problem) fail(sec.line, 1, "duplicate [problem] section");
      cfg.problem = parse_problem(sec);
      have_problem = true;
    } else if (sec.kind == "run") {
      for (const RunSpec& existing : cfg.runs) {
        if (existing.id == sec.id) fail(sec.line, 1, "duplicate run id '" + sec.id + "'");
      }
      cfg.runs.push_back(parse_run(sec));
    } else {
      cfg.output = parse_output(sec);
    }
  }
  if (!have_problem) throw ConfigError("config:1:1: missing [problem] section");
  if (cfg.runs.empty()) throw ConfigError("config:1:1: no [run <id>] sections");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "[problem]\n";
  const ProblemSpec& p = cfg.problem;
  append(out, "family", p.family);
  if (p.m) append(out, "m", std::to_string(*p.m));
  if (p.n) append(out, "n", std::to_string(*p.n));
  if (p.eps_param) append(out, "eps_param", num(*p.eps_param));
  if (p.seed) append(out, "seed", std::to_string(*p.seed));
  if (p.shared_null) append(out, "shared_null", std::to_string(*p.shared_null));
  if (p.delta) append(out, "delta", num(*p.delta));
  if (p.alignment_epsilon) append(out, "alignment_epsilon", num(*p.alignment_epsilon));
  if (p.preset) append(out, "preset", *p.preset);
  if (p.d_i) append(out, "d_i", std::to_string(*p.d_i));
  if (p.hidden) append(out, "hidden", std::to_string(*p.hidden));
  if (p.d_o) append(out, "d_o", std::to_string(*p.d_o));
  if (p.batches) append(out, "batches", std::to_string(*p.batches));
  if (p.batch_size) append(out, "batch_size", std::to_string(*p.batch_size));
  if (p.start_scale) append(out, "start_scale", num(*p.start_scale));
  if (p.fstar_shift) append(out, "fstar_shift", num(*p.fstar_shift));

  for (const RunSpec& r : cfg.runs) {
    out += "\n[run " + r.id + "]\n";
    append(out, "algorithm", r.algorithm);
    append(out, "iterations", std::to_string(r.iterations));
    if (r.epsilon != 0.0) append(out, "epsilon", num(r.epsilon));
    if (r.momentum) append(out, "momentum", num(*r.momentum));
    if (r.gd_step) append(out, "gd_step", num(*r.gd_step));
    if (r.ogd_distance) append(out, "ogd_distance", num(*r.ogd_distance));
    if (r.ew_fstar) append(out, "ew_fstar", num(*r.ew_fstar));
    if (r.stop_on_epsilon) append(out, "stop_on_epsilon", "true");
    if (!r.check_bounds) append(out, "check_bounds", "false");
  }

  out += "\n[output]\n";
  append(out, "directory", cfg.output.directory);
  append(out, "csv", cfg.output.csv ? "true" : "false");
  append(out, "json", cfg.output.json ? "true" : "false");
  append(out, "svg", cfg.output.svg ? "true" : "false");
  if (cfg.output.threads) append(out, "threads", std::to_string(*cfg.output.threads));
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace amoo
