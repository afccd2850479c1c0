#pragma once

#include "perf/performative.hpp"

#include <string>
#include <vector>

namespace perf {

enum class ExperimentKind { credit_strategic, regression_meanshift, classification_2d, fairness_10d, custom };

enum class MapKind { strategic_fixed, strategic_generated, mean_shift };

struct MapConfig {
  MapKind kind = MapKind::strategic_generated;
  std::vector<double> epsilon_grid{0.0};
  std::vector<int> strategic_indices;
  bool bootstrap = false;
  // strategic-generated mixture
  int d = 2;
  double mu_a = 1.0, mu_b = 0.8, sigma = 0.1, c_a = 0.8;
  // mean-shift
  std::vector<MeanShiftVariant> variants{MeanShiftVariant::D0};
  MeanShiftMapSpec mean_shift;
};

struct TrainerConfig {
  TrainerMethod method = TrainerMethod::fixed_step;
  double step = 0.1;
  int epochs = 100;
  int batch = 0;  // 0 = full batch
  int backtracking_iters = 2000;
  EtaSearchConfig eta_search;
};

struct RdroOverrides {
  bool has_trainer = false;
  TrainerConfig trainer;
  bool has_warm_start = false;
  bool warm_start = true;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::custom;
  ObjectiveSpec objective;  // DRO side; RRM cells use mode=erm with the same loss
  MapConfig map;
  int iterations = 30;
  Eigen::Index samples_per_round = 1000;  // 0 = full fixed base per round
  bool warm_start = true;
  double theta0_intercept = 0.0;
  TrainerConfig trainer;
  RdroOverrides rdro;
  std::vector<std::string> methods{"rrm"};
  std::vector<uint64_t> seeds{1};
  std::string credit_csv;
  std::string target_column = "SeriousDlqin2yrs";
  std::string out_dir = "out";
};

// Parses + validates config text (JSON). On failure throws ConfigError whose
// messages are field-addressed and aggregated.
struct ConfigError : std::runtime_error {
  std::vector<std::string> errors;
  explicit ConfigError(std::vector<std::string> errs);
};

ExperimentConfig validate_config(const std::string& raw_text);

std::vector<std::string> preset_names();
// Full default config JSON for a preset (round-trips through validate_config).
std::string preset_config_text(const std::string& name);

}  // namespace perf
