#pragma once

#include "perf/model.hpp"

#include <cstdint>
#include <variant>

namespace perf {

struct StrategicMapSpec {
  double epsilon = 0.0;
  std::vector<int> strategic_indices;
  bool bootstrap = false;  // resample base with replacement even when n == |base|
};

enum class MeanShiftVariant { D0, D1, D2 };

struct MeanShiftMapSpec {
  MeanShiftVariant variant = MeanShiftVariant::D0;
  double mu_a = 4.0;  // base mean, used where the variant keeps a group fixed
  double mu_b = 4.0;
  double sigma2 = 0.01;
  double c_a = 0.2;
  double c_b = 0.8;
};

// Group means induced by theta under the Table-row variants:
//   D0: A = theta,   B = theta/2
//   D1: A = mu_a,    B = theta/2
//   D2: A = 2*theta, B = theta/2
std::pair<double, double> mean_shift_means(const MeanShiftMapSpec& spec, double theta);

struct InducedSample {
  Dataset dataset;
  std::string map_id;
  Eigen::VectorXd theta_used;
};

Eigen::VectorXd strategic_best_response(const Eigen::VectorXd& x, const LinearModel& theta,
                                        const StrategicMapSpec& spec);

// Draws n rows from the FIXED base (in order when n == |base| and not
// bootstrapping; with replacement otherwise) and applies the best response.
// Never compounds: always relative to base, never to a previously induced set.
InducedSample sample_strategic(const Dataset& base, const LinearModel& theta,
                               const StrategicMapSpec& spec, Eigen::Index n, uint64_t seed);

InducedSample sample_mean_shift(const MeanShiftMapSpec& spec, double theta, Eigen::Index n,
                                uint64_t seed);

// Identity-coupling transport cost between the two induced sets; equals
// epsilon * ||theta_S - theta'_S||_2 and upper-bounds W1.
double empirical_sensitivity(const Dataset& base, const LinearModel& theta,
                             const LinearModel& theta_prime, const StrategicMapSpec& spec);

}  // namespace perf
