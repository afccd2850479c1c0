#pragma once

#include "perf/model.hpp"

#include <cmath>
#include <map>

namespace perf {

struct GroupMetrics {
  double accuracy = 0.0;
  std::map<std::string, double> group_accuracy;
  double fairness_gap = 0.0;  // max - min over per-group accuracies
  double mean_loss = 0.0;
  std::map<std::string, double> group_loss;
};

// Decision rule: predict 1 iff score > 0 (ties to 0).
GroupMetrics evaluate(const LinearModel& m, const Dataset& data, const LossKind& loss);

// One row per loop iteration; NaN marks fields that do not apply.
struct IterationRecord {
  int t = 0;
  Eigen::VectorXd theta;
  double theta_gap = std::numeric_limits<double>::quiet_NaN();
  double sup_loss = std::numeric_limits<double>::quiet_NaN();
  double perf_loss = std::numeric_limits<double>::quiet_NaN();
  double acc_all = std::numeric_limits<double>::quiet_NaN();
  double acc_a = std::numeric_limits<double>::quiet_NaN();
  double acc_b = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
};

struct TrajectoryRecord {
  std::vector<IterationRecord> iterations;
  bool gap_normalization_degenerate = false;  // theta0 had zero strategic norm
  bool diverged = false;
  std::string note;
};

// Columns: t,theta_gap,sup_loss,perf_loss,acc_all,acc_A,acc_B,eta.
// Values serialized with 17 significant digits (bitwise round-trippable).
void emit_csv(const TrajectoryRecord& traj, const std::string& path);

// Generic table emitter used for summary files; same number formatting.
void emit_csv_table(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& path);

std::string format_g17(double v);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void emit_svg_lines(const std::vector<SvgSeries>& series, const std::string& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_y = false);

}  // namespace perf
