#pragma once

#include "perf/model.hpp"

namespace perf {

struct CressieReadSpec {
  double k = 2.0;
  double rho = 0.0;

  double k_star() const { return k / (k - 1.0); }
  void validate() const {
    if (!(k > 1.0)) throw std::invalid_argument("CressieReadSpec: k must be > 1");
    if (rho < 0.0) throw std::invalid_argument("CressieReadSpec: rho must be >= 0");
  }
};

enum class ObjectiveMode { erm, dro_search_eta, dro_fixed_eta };

struct ObjectiveSpec {
  ObjectiveMode mode = ObjectiveMode::erm;
  LossKind loss;
  CressieReadSpec cr;      // dro_search_eta
  double fixed_eta = 0.0;  // dro_fixed_eta
};

double erm_objective(const LinearModel& m, const Dataset& data, const LossKind& loss);

// c_k(rho) = (1 + k(k-1)rho)^(1/k)
double c_k(const CressieReadSpec& spec);

// (1/n) sum max(l_i - eta, 0)^{k*}
double truncated_inner_objective(const LinearModel& m, const Dataset& data,
                                 const LossKind& loss, double eta, double k_star = 2.0);

// Gradient w.r.t. (weights, intercept) of the truncated objective.
// Subgradient 0 at the kink l_i = eta.
Eigen::VectorXd truncated_inner_grad(const LinearModel& m, const Dataset& data,
                                     const LossKind& loss, double eta, double k_star = 2.0);

// c_k(rho) * (truncated inner)^{1/k*} + eta   (the bracketed dual at a given eta)
double dro_dual_objective(const LinearModel& m, const Dataset& data, const LossKind& loss,
                          const CressieReadSpec& spec, double eta);

}  // namespace perf
