#include "perf/distmaps.hpp"

#include <cmath>
#include <random>

namespace perf {

std::pair<double, double> mean_shift_means(const MeanShiftMapSpec& spec, double theta) {
  switch (spec.variant) {
    case MeanShiftVariant::D0: return {theta, theta / 2.0};
    case MeanShiftVariant::D1: return {spec.mu_a, theta / 2.0};
    case MeanShiftVariant::D2: return {2.0 * theta, theta / 2.0};
  }
  throw std::logic_error("mean_shift_means: bad variant");
}

Eigen::VectorXd strategic_best_response(const Eigen::VectorXd& x, const LinearModel& theta,
                                        const StrategicMapSpec& spec) {
  if (x.size() != theta.d()) throw std::invalid_argument("strategic_best_response: dim mismatch");
  if (spec.epsilon < 0.0) throw std::invalid_argument("strategic_best_response: epsilon < 0");
  Eigen::VectorXd out = x;
  for (int j : spec.strategic_indices) {
    if (j < 0 || j >= x.size())
      throw std::out_of_range("strategic_best_response: strategic index out of range");
    out(j) -= spec.epsilon * theta.weights(j);
  }
  return out;
}

InducedSample sample_strategic(const Dataset& base, const LinearModel& theta,
                               const StrategicMapSpec& spec, Eigen::Index n, uint64_t seed) {
  if (base.n() == 0) throw std::invalid_argument("sample_strategic: empty base");
  InducedSample out;
  out.map_id = "strategic(eps=" + std::to_string(spec.epsilon) + ")";
  out.theta_used = theta_of(theta);
  Dataset& d = out.dataset;
  d.task = base.task;
  d.X.resize(n, base.d());
  d.y.resize(n);
  if (base.has_groups()) d.group.resize(static_cast<size_t>(n));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, base.n() - 1);
  const bool in_order = (n == base.n()) && !spec.bootstrap;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = in_order ? i : pick(rng);
    d.X.row(i) = strategic_best_response(base.X.row(src).transpose(), theta, spec).transpose();
    d.y(i) = base.y(src);
    if (base.has_groups()) d.group[static_cast<size_t>(i)] = base.group[static_cast<size_t>(src)];
  }
  return out;
}

InducedSample sample_mean_shift(const MeanShiftMapSpec& spec, double theta, Eigen::Index n,
                                uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_mean_shift: n < 1");
  if (spec.sigma2 <= 0.0) throw std::invalid_argument("sample_mean_shift: sigma2 <= 0");
  if (std::abs(spec.c_a + spec.c_b - 1.0) > 1e-12)
    throw std::invalid_argument("sample_mean_shift: mixture weights must sum to 1");
  const auto [ma, mb] = mean_shift_means(spec, theta);
  InducedSample out;
  out.map_id = "mean-shift";
  out.theta_used = Eigen::VectorXd::Constant(1, theta);
  Dataset& d = out.dataset;
  d.task = Task::regression;
  d.X.resize(n, 0);
  d.y.resize(n);
  d.group.resize(static_cast<size_t>(n));

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution is_a(spec.c_a);
  std::normal_distribution<double> gauss(0.0, std::sqrt(spec.sigma2));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool a = is_a(rng);
    d.y(i) = (a ? ma : mb) + gauss(rng);
    d.group[static_cast<size_t>(i)] = a ? "A" : "B";
  }
  return out;
}

double empirical_sensitivity(const Dataset& base, const LinearModel& theta,
                             const LinearModel& theta_prime, const StrategicMapSpec& spec) {
  if (theta.d() != theta_prime.d())
    throw std::invalid_argument("empirical_sensitivity: dim mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < base.n(); ++i) {
    const Eigen::VectorXd a = strategic_best_response(base.X.row(i).transpose(), theta, spec);
    const Eigen::VectorXd b = strategic_best_response(base.X.row(i).transpose(), theta_prime, spec);
    acc += (a - b).norm();
  }
  return acc / static_cast<double>(base.n());
}

}  // namespace perf
