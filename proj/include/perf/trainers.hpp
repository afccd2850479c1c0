#pragma once

#include "perf/objectives.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace perf {

struct BatchSpec {
  bool full = true;
  int size = 0;  // minibatch size when full == false
};

struct GdConfig {
  double step = 0.1;
  int epochs = 100;
  BatchSpec batch;
  uint64_t seed = 0;
  bool record_trace = false;
};

struct EtaSearchConfig {
  double lo = 0.0;
  double hi = 1.0;
  bool auto_bracket = true;  // bracket = [0, max pointwise loss at init + 1]
  int max_rounds = 60;
  double tolerance = 1e-4;
};

struct TrainReport {
  LinearModel model;
  double objective = 0.0;
  std::optional<double> eta;
  std::vector<double> trace;  // decimated per-epoch objective, if requested
};

// Thrown when the objective blows past the divergence guard (1e12); carries
// the parameters at abort so loops can record how far the iterate ran away.
struct DivergedError : std::runtime_error {
  LinearModel model;
  DivergedError(std::string msg, LinearModel m)
      : std::runtime_error(std::move(msg)), model(std::move(m)) {}
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TrainReport train_erm(const Dataset& data, const LossKind& loss, const GdConfig& cfg,
                      const LinearModel& init);

TrainReport train_backtracking(const Dataset& data, const LossKind& loss, const LinearModel& init,
                               int max_iters, double armijo_c = 1e-4, double shrink = 0.5);

TrainReport train_dro_fixed_eta(const Dataset& data, const LossKind& loss, double eta,
                                const GdConfig& cfg, const LinearModel& init,
                                double k_star = 2.0);

// Golden-section search on F(eta) = dual(theta_hat(eta), eta); inner solves are
// warm-started at epochs/10, with a full-epochs polish at eta*.
TrainReport train_dro(const Dataset& data, const LossKind& loss, const CressieReadSpec& spec,
                      const EtaSearchConfig& search, const GdConfig& cfg,
                      const LinearModel& init);

}  // namespace perf
