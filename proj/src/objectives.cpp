#include "perf/objectives.hpp"

#include <cmath>

namespace perf {

double erm_objective(const LinearModel& m, const Dataset& data, const LossKind& loss) {
  if (data.n() == 0) throw std::invalid_argument("erm_objective: empty data");
  return batch_losses(m, data, loss).mean();
}

double c_k(const CressieReadSpec& spec) {
  spec.validate();
  return std::pow(1.0 + spec.k * (spec.k - 1.0) * spec.rho, 1.0 / spec.k);
}

double truncated_inner_objective(const LinearModel& m, const Dataset& data,
                                 const LossKind& loss, double eta, double k_star) {
  if (data.n() == 0) throw std::invalid_argument("truncated_inner_objective: empty data");
  const Eigen::VectorXd l = batch_losses(m, data, loss);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    const double t = l(i) - eta;
    if (t > 0.0) acc += (k_star == 2.0) ? t * t : std::pow(t, k_star);
  }
  return acc / static_cast<double>(l.size());
}

Eigen::VectorXd truncated_inner_grad(const LinearModel& m, const Dataset& data,
                                     const LossKind& loss, double eta, double k_star) {
  if (data.n() == 0) throw std::invalid_argument("truncated_inner_grad: empty data");
  const Eigen::Index n = data.n();
  const Eigen::VectorXd s = predict_scores(m, data.X);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.d() + 1);

  if (loss.family == LossFamily::squared) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = data.y(i) - s(i);
      const double t = r * r - eta;
      if (t <= 0.0) continue;
      const double outer = (k_star == 2.0) ? k_star * t : k_star * std::pow(t, k_star - 1.0);
      const double c = outer * 2.0 * (s(i) - data.y(i));
      g.head(m.d()) += c * data.X.row(i).transpose();
      g(m.d()) += c;
    }
    return g / static_cast<double>(n);
  }

  const double reg = 0.5 * loss.lambda * m.weights.squaredNorm();
  double active_outer_sum = 0.0;  // regularizer gradient shared by all active terms
  for (Eigen::Index i = 0; i < n; ++i) {
    const double li = log1p_exp(s(i)) - data.y(i) * s(i) + reg;
    const double t = li - eta;
    if (t <= 0.0) continue;
    const double outer = (k_star == 2.0) ? k_star * t : k_star * std::pow(t, k_star - 1.0);
    const double c = outer * (sigmoid(s(i)) - data.y(i));
    g.head(m.d()) += c * data.X.row(i).transpose();
    g(m.d()) += c;
    active_outer_sum += outer;
  }
  g.head(m.d()) += loss.lambda * active_outer_sum * m.weights;
  return g / static_cast<double>(n);
}

double dro_dual_objective(const LinearModel& m, const Dataset& data, const LossKind& loss,
                          const CressieReadSpec& spec, double eta) {
  const double inner = truncated_inner_objective(m, data, loss, eta, spec.k_star());
  return c_k(spec) * std::pow(inner, 1.0 / spec.k_star()) + eta;
}

}  // namespace perf
