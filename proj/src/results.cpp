#include "amoo/results.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace amoo {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ResultRecord make_result_record(const std::string& run_id,
                                std::uint64_t config_hash,
                                const Trajectory& traj, const ObjectiveSet& f,
                                const BoundReport* report) {
  ResultRecord rec;
  rec.run_id = run_id;
  rec.config_hash = config_hash;
  rec.stopped_early = traj.stopped_early;
  rec.stop_index = traj.stop_index;
  if (report != nullptr) rec.verdicts = report->checks;

  Point running_sum = Point::Zero(traj.iterates.empty() ? 0
                                                        : traj.iterates[0].size());
  for (int k = 1; k <= traj.steps(); ++k) {
    running_sum += traj.iterates[k - 1];
    ResultRow row;
    row.k = k;
    row.mg_xk = traj.per_step_max_gap[k - 1];
    row.mg_xbar_k = max_gap(f, running_sum / k);
    row.step_size = traj.step_sizes[k - 1];
    row.selected_index = traj.selected_indices[k - 1];
    row.w = traj.weights[k - 1];
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

std::string results_csv_header(int weight_count) {
  std::string h = "run_id,k,mg_xk,mg_xbar_k,step_size,selected_index";
  for (int i = 0; i < weight_count; ++i) {
    h += ",w" + std::to_string(i);
  }
  h += "\n";
  return h;
}

std::string to_csv(const std::vector<ResultRecord>& records) {
  int weight_count = 0;
  for (const ResultRecord& rec : records) {
    if (!rec.rows.empty()) {
      weight_count = std::max(weight_count,
                              static_cast<int>(rec.rows.front().w.size()));
    }
  }
  std::string out = results_csv_header(weight_count);
  for (const ResultRecord& rec : records) {
    for (const ResultRow& row : rec.rows) {
      out += rec.run_id;
      out += ',' + std::to_string(row.k);
      out += ',' + format_g17(row.mg_xk);
      out += ',' + format_g17(row.mg_xbar_k);
      out += ',' + format_g17(row.step_size);
      out += ',' + std::to_string(row.selected_index);
      for (int i = 0; i < weight_count; ++i) {
        out += ',' + format_g17(i < row.w.size() ? row.w[i] : 0.0);
      }
      out += '\n';
    }
  }
  return out;
}

std::string to_json(const std::vector<ResultRecord>& records) {
  nlohmann::json root = nlohmann::json::array();
  for (const ResultRecord& rec : records) {
    nlohmann::json jr;
    jr["run_id"] = rec.run_id;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(rec.config_hash));
    jr["config_hash"] = hash;
    jr["stopped_early"] = rec.stopped_early;
    if (rec.stopped_early) jr["stop_index"] = rec.stop_index;
    nlohmann::json rows = nlohmann::json::array();
    for (const ResultRow& row : rec.rows) {
      nlohmann::json jrow;
      jrow["k"] = row.k;
      jrow["mg_xk"] = row.mg_xk;
      jrow["mg_xbar_k"] = row.mg_xbar_k;
      jrow["step_size"] = row.step_size;
      jrow["selected_index"] = row.selected_index;
      std::vector<double> w(row.w.data(), row.w.data() + row.w.size());
      jrow["w"] = w;
      rows.push_back(std::move(jrow));
    }
    jr["rows"] = std::move(rows);
    nlohmann::json verdicts = nlohmann::json::array();
    for (const BoundCheck& c : rec.verdicts) {
      nlohmann::json jc;
      jc["k"] = c.k;
      jc["kind"] = bound_kind_name(c.kind);
      jc["empirical"] = c.empirical;
      jc["bound"] = c.bound;
      jc["is_upper"] = c.is_upper;
      jc["pass"] = c.pass;
      jc["slack"] = c.slack;
      verdicts.push_back(std::move(jc));
    }
    jr["verdicts"] = std::move(verdicts);
    root.push_back(std::move(jr));
  }
  return root.dump(2) + "\n";
}

std::string bound_report_csv(const std::vector<ResultRecord>& records) {
  std::string out = "run_id,k,kind,empirical,bound,is_upper,pass,slack\n";
  for (const ResultRecord& rec : records) {
    for (const BoundCheck& c : rec.verdicts) {
      out += rec.run_id;
      out += ',' + std::to_string(c.k);
      out += ',';
      out += bound_kind_name(c.kind);
      out += ',' + format_g17(c.empirical);
      out += ',' + format_g17(c.bound);
      out += c.is_upper ? ",upper" : ",lower";
      out += c.pass ? ",pass" : ",fail";
      out += ',' + format_g17(c.slack);
      out += '\n';
    }
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp." +
                       std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw UsageError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace amoo
