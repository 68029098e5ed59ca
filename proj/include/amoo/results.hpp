#ifndef AMOO_RESULTS_HPP
#define AMOO_RESULTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "amoo/analysis.hpp"

// Result persistence. CSV rows follow
//   run_id,k,mg_xk,mg_xbar_k,step_size,selected_index,w0..w{m-1}
// with floats printed to 17 significant digits so 64-bit values round-trip
// losslessly. Files are written via temp-then-rename, so an interrupted run
// never leaves a partial file at the final path.

namespace amoo {

struct ResultRow {
  int k = 0;
  double mg_xk = 0.0;
  double mg_xbar_k = 0.0;
  double step_size = 0.0;
  int selected_index = -1;
  WeightVector w;
};

struct ResultRecord {
  std::string run_id;
  std::uint64_t config_hash = 0;
  std::vector<ResultRow> rows;
  std::vector<BoundCheck> verdicts;
  bool stopped_early = false;
  int stop_index = -1;
};

ResultRecord make_result_record(const std::string& run_id,
                                std::uint64_t config_hash,
                                const Trajectory& traj, const ObjectiveSet& f,
                                const BoundReport* report = nullptr);

std::string format_g17(double v);

std::string results_csv_header(int weight_count);
std::string to_csv(const std::vector<ResultRecord>& records);
std::string to_json(const std::vector<ResultRecord>& records);

std::string bound_report_csv(const std::vector<ResultRecord>& records);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace amoo

#endif
