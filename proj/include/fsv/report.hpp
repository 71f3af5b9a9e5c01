#pragma once

#include <string>
#include <vector>

#include "fsv/config.hpp"

namespace fsv {

struct RunReport {
  std::string command;
  RunConfig config;
  std::vector<BranchResult> branches;
  std::vector<SampleRow> samples;
  double seconds = 0.0;

  bool certified() const;
};

// 17 significant digits; round-trips exactly.
std::string fmt17(double v);

// JSON report. The "timings" and "generated_at" members are the only ones
// that differ between runs of the same configuration.
std::string report_json(const RunReport& r, bool include_volatile = true);

std::string cells_csv(const RunReport& r);
std::string eigenpairs_csv(const RunReport& r);
std::string smoothness_csv(const RunReport& r);

// Writes report.json, cells.csv, eigenpairs.csv and (optionally)
// smoothness.csv into dir, creating it if needed.
void write_reports(const RunReport& r, const std::string& dir, bool smoothness);

}  // namespace fsv
