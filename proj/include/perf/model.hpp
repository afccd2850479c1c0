#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perf {

enum class Task { classification, regression };

struct LabeledSample {
  Eigen::VectorXd features;
  double target = 0.0;
  std::optional<std::string> group;
};

// Columnar dataset: one row of X per sample. group is empty or one tag per row.
struct Dataset {
  Eigen::MatrixXd X;          // n x d (d may be 0 for intercept-only tasks)
  Eigen::VectorXd y;          // n
  std::vector<std::string> group;  // empty, or size n
  Task task = Task::classification;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
  bool has_groups() const { return !group.empty(); }

  LabeledSample sample(Eigen::Index i) const;
  void validate() const;  // throws std::invalid_argument on broken invariants
};

Dataset make_dataset(std::vector<LabeledSample> samples, Task task);

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  Task task = Task::classification;

  Eigen::Index d() const { return weights.size(); }
};

LinearModel zero_model(Eigen::Index d, Task task);

// Full parameter vector (weights..., intercept) used for gaps and diagnostics.
Eigen::VectorXd theta_of(const LinearModel& m);
LinearModel model_from_theta(const Eigen::VectorXd& theta, Task task);

enum class LossFamily { logistic, squared };

struct LossKind {
  LossFamily family = LossFamily::logistic;
  double lambda = 0.0;  // L2 strength; applies to weights only, never intercept
};

double predict_score(const LinearModel& m, const Eigen::VectorXd& x);
Eigen::VectorXd predict_scores(const LinearModel& m, const Eigen::MatrixXd& X);

double pointwise_loss(const LinearModel& m, const LabeledSample& z, const LossKind& loss);
// Gradient w.r.t. (weights, intercept); length d+1, intercept last.
Eigen::VectorXd pointwise_grad(const LinearModel& m, const LabeledSample& z, const LossKind& loss);

// Batch losses for a whole dataset (one entry per row).
Eigen::VectorXd batch_losses(const LinearModel& m, const Dataset& data, const LossKind& loss);

// Numerically stable sigmoid and log(1+e^s).
double sigmoid(double s);
double log1p_exp(double s);

}  // namespace perf
