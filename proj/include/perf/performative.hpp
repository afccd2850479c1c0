#pragma once

#include "perf/datagen.hpp"
#include "perf/distmaps.hpp"
#include "perf/metrics.hpp"
#include "perf/trainers.hpp"

#include <variant>

namespace perf {

// D(theta) sources. Strategic maps act on a fixed base dataset or on a fresh
// mixture draw per round; the mean-shift map is itself the generator.
struct StrategicFixedBase {
  Dataset base;
  StrategicMapSpec spec;
};
struct StrategicGenerated {
  GaussianMixtureSpec gen;
  StrategicMapSpec spec;
  // The loop materializes one base draw per cell by default (the best response
  // is always taken relative to the same base P); true resamples every round.
  bool fresh_per_round = false;
};
struct MeanShift {
  MeanShiftMapSpec spec;
};
using DistributionMap = std::variant<StrategicFixedBase, StrategicGenerated, MeanShift>;

Dataset sample_map(const DistributionMap& map, const LinearModel& theta, Eigen::Index n,
                   uint64_t seed);

enum class TrainerMethod { fixed_step, backtracking };

struct LoopConfig {
  int iterations = 30;
  Eigen::Index samples_per_round = 1000;
  ObjectiveSpec objective;
  TrainerMethod method = TrainerMethod::fixed_step;  // ERM path only; DRO inner is fixed-step
  GdConfig gd;
  EtaSearchConfig eta_search;
  int backtracking_iters = 2000;
  DistributionMap map;
  uint64_t seed = 0;
  bool warm_start = true;  // retrain from the deployed model; false = re-init at zero
  LossKind loss() const { return objective.loss; }
};

TrajectoryRecord run_rrm(const LoopConfig& cfg, const LinearModel& theta0);
TrajectoryRecord run_rdro(const LoopConfig& cfg, const LinearModel& theta0);

// (1/||(theta0)_S||) * ||theta_next - theta_curr||. strategic_indices address
// weight coordinates; empty means the full (weights, intercept) vector. A zero
// reference norm returns the raw gap and sets *degenerate.
double theta_gap(const Eigen::VectorXd& theta_next, const Eigen::VectorXd& theta_curr,
                 const Eigen::VectorXd& theta0, const std::vector<int>& strategic_indices,
                 bool* degenerate = nullptr);

// Theorem-style iteration bound t >= (1 - c)^{-1} log(dist/delta), c = omega*eps*beta/gamma.
double iteration_bound(double omega, double eps, double beta, double gamma, double dist,
                       double delta);

struct ContractionDiagnostics {
  std::vector<double> gap_ratios;
  double geometric_mean_ratio = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

ContractionDiagnostics contraction_diagnostics(const TrajectoryRecord& traj, double tolerance);

double performative_risk_estimate(const LinearModel& theta, const DistributionMap& map,
                                  const ObjectiveSpec& objective, Eigen::Index n, uint64_t seed);

// Dual value minimized over eta at fixed theta (scalar golden-section).
double min_eta_dual(const LinearModel& m, const Dataset& data, const LossKind& loss,
                    const CressieReadSpec& spec);

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0);

}  // namespace perf
