#include "perf/model.hpp"

#include <cmath>

namespace perf {

LabeledSample Dataset::sample(Eigen::Index i) const {
  LabeledSample z;
  z.features = X.row(i).transpose();
  z.target = y(i);
  if (has_groups()) z.group = group[static_cast<size_t>(i)];
  return z;
}

void Dataset::validate() const {
  if (n() == 0) throw std::invalid_argument("dataset: empty");
  if (y.size() != n()) throw std::invalid_argument("dataset: target count != row count");
  if (!group.empty() && static_cast<Eigen::Index>(group.size()) != n())
    throw std::invalid_argument("dataset: group tags must cover every sample or none");
  if (task == Task::classification) {
    for (Eigen::Index i = 0; i < n(); ++i)
      if (y(i) != 0.0 && y(i) != 1.0)
        throw std::invalid_argument("dataset: classification target not in {0,1}");
  }
}

Dataset make_dataset(std::vector<LabeledSample> samples, Task task) {
  if (samples.empty()) throw std::invalid_argument("make_dataset: empty");
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index d = samples[0].features.size();
  const bool grouped = samples[0].group.has_value();
  Dataset data;
  data.task = task;
  data.X.resize(n, d);
  data.y.resize(n);
  if (grouped) data.group.reserve(samples.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& z = samples[static_cast<size_t>(i)];
    if (z.features.size() != d)
      throw std::invalid_argument("make_dataset: inconsistent feature dimension");
    if (z.group.has_value() != grouped)
      throw std::invalid_argument("make_dataset: group tags must cover every sample or none");
    data.X.row(i) = z.features.transpose();
    data.y(i) = z.target;
    if (grouped) data.group.push_back(*z.group);
  }
  data.validate();
  return data;
}

LinearModel zero_model(Eigen::Index d, Task task) {
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(d);
  m.intercept = 0.0;
  m.task = task;
  return m;
}

Eigen::VectorXd theta_of(const LinearModel& m) {
  Eigen::VectorXd th(m.d() + 1);
  th.head(m.d()) = m.weights;
  th(m.d()) = m.intercept;
  return th;
}

LinearModel model_from_theta(const Eigen::VectorXd& theta, Task task) {
  if (theta.size() < 1) throw std::invalid_argument("model_from_theta: need at least intercept");
  LinearModel m;
  m.weights = theta.head(theta.size() - 1);
  m.intercept = theta(theta.size() - 1);
  m.task = task;
  return m;
}

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double log1p_exp(double s) {
  // log(1+e^s) without overflow for large |s|
  if (s > 30.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

double predict_score(const LinearModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.d()) throw std::invalid_argument("predict_score: dimension mismatch");
  return m.weights.dot(x) + m.intercept;
}

Eigen::VectorXd predict_scores(const LinearModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.d()) throw std::invalid_argument("predict_scores: dimension mismatch");
  return (X * m.weights).array() + m.intercept;
}

double pointwise_loss(const LinearModel& m, const LabeledSample& z, const LossKind& loss) {
  const double s = predict_score(m, z.features);
  if (loss.family == LossFamily::squared) {
    const double r = z.target - s;
    return r * r;
  }
  if (z.target != 0.0 && z.target != 1.0)
    throw std::invalid_argument("pointwise_loss: logistic loss needs binary target");
  // -[y log sigma(s) + (1-y) log(1-sigma(s))] = log(1+e^s) - y*s
  const double ce = log1p_exp(s) - z.target * s;
  return ce + 0.5 * loss.lambda * m.weights.squaredNorm();
}

Eigen::VectorXd pointwise_grad(const LinearModel& m, const LabeledSample& z, const LossKind& loss) {
  const double s = predict_score(m, z.features);
  Eigen::VectorXd g(m.d() + 1);
  if (loss.family == LossFamily::squared) {
    const double c = 2.0 * (s - z.target);
    g.head(m.d()) = c * z.features;
    g(m.d()) = c;
    return g;
  }
  if (z.target != 0.0 && z.target != 1.0)
    throw std::invalid_argument("pointwise_grad: logistic loss needs binary target");
  const double c = sigmoid(s) - z.target;
  g.head(m.d()) = c * z.features + loss.lambda * m.weights;
  g(m.d()) = c;
  return g;
}

Eigen::VectorXd batch_losses(const LinearModel& m, const Dataset& data, const LossKind& loss) {
  const Eigen::VectorXd s = predict_scores(m, data.X);
  Eigen::VectorXd out(data.n());
  if (loss.family == LossFamily::squared) {
    out = (data.y - s).array().square();
    return out;
  }
  const double reg = 0.5 * loss.lambda * m.weights.squaredNorm();
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.y(i) != 0.0 && data.y(i) != 1.0)
      throw std::invalid_argument("batch_losses: logistic loss needs binary target");
    out(i) = log1p_exp(s(i)) - data.y(i) * s(i) + reg;
  }
  return out;
}

}  // namespace perf
