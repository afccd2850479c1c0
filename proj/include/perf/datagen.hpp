#pragma once

#include "perf/model.hpp"

#include <cstdint>

namespace perf {

struct GaussianMixtureSpec {
  Eigen::VectorXd mu_a;
  Eigen::VectorXd mu_b;
  Eigen::VectorXd var_a;  // diagonal covariance entries
  Eigen::VectorXd var_b;
  double c_a = 0.8;
  double c_b = 0.2;

  void validate() const;
};

// Fairness-experiment defaults: d=10, mu_A=1, mu_B=0.8, sigma=0.1, c_A=0.8.
GaussianMixtureSpec fairness_mixture_defaults(int d = 10, double mu_a = 1.0, double mu_b = 0.8,
                                              double sigma = 0.1, double c_a = 0.8);

// Binary labels by each group's OWN mean-sum threshold: y=1 iff sum(x) > sum(mu_g).
Dataset gen_group_threshold_data(const GaussianMixtureSpec& spec, Eigen::Index n, uint64_t seed);

// Scalar mixture for the mean-prediction task; target = the drawn value.
Dataset gen_mixture_scalar(double mu_a, double mu_b, double sigma2, double c_a, Eigen::Index n,
                           uint64_t seed);

struct CreditPipelineSpec {
  std::string source_path;
  std::string target_column = "SeriousDlqin2yrs";
  bool balance = true;
  bool standardize = true;
  uint64_t balance_seed = 0;
};

// Drops rows with missing numeric fields, downsamples the majority class to the
// minority count (seeded, without replacement), then standardizes each feature
// column to mean 0 / variance 1 using post-balancing statistics.
Dataset ingest_credit(const CreditPipelineSpec& spec);

}  // namespace perf
