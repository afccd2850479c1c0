#pragma once

#include "perf/config.hpp"

namespace perf {

struct CellResult {
  std::string method;     // "rrm" | "rdro"
  std::string cell_key;   // eps... or variant tag
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  TrajectoryRecord trajectory;
  double final_scalar_theta = std::numeric_limits<double>::quiet_NaN();  // regression cells
};

struct RunResult {
  std::vector<CellResult> cells;
  bool all_ok = false;
  std::string manifest_path;
};

// Runs the full (method x epsilon/variant x seed) grid, writes per-cell
// trajectory CSVs, a summary CSV, theta-gap SVGs, and a manifest.
// Worker count: min(cells, hardware, PERF_WORKERS env var if set).
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& raw_config_text);

}  // namespace perf
