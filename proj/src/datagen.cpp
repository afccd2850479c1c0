#include "perf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace perf {

void GaussianMixtureSpec::validate() const {
  const Eigen::Index d = mu_a.size();
  if (d == 0 || mu_b.size() != d || var_a.size() != d || var_b.size() != d)
    throw std::invalid_argument("GaussianMixtureSpec: inconsistent dimensions");
  if (!(c_a > 0.0 && c_a < 1.0 && c_b > 0.0 && c_b < 1.0) || std::abs(c_a + c_b - 1.0) > 1e-12)
    throw std::invalid_argument("GaussianMixtureSpec: weights must be in (0,1) and sum to 1");
  if ((var_a.array() <= 0.0).any() || (var_b.array() <= 0.0).any())
    throw std::invalid_argument("GaussianMixtureSpec: covariance diagonals must be positive");
}

GaussianMixtureSpec fairness_mixture_defaults(int d, double mu_a, double mu_b, double sigma,
                                              double c_a) {
  GaussianMixtureSpec s;
  s.mu_a = Eigen::VectorXd::Constant(d, mu_a);
  s.mu_b = Eigen::VectorXd::Constant(d, mu_b);
  s.var_a = Eigen::VectorXd::Constant(d, sigma * sigma);
  s.var_b = Eigen::VectorXd::Constant(d, sigma * sigma);
  s.c_a = c_a;
  s.c_b = 1.0 - c_a;
  return s;
}

Dataset gen_group_threshold_data(const GaussianMixtureSpec& spec, Eigen::Index n, uint64_t seed) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("gen_group_threshold_data: n < 1");
  const Eigen::Index d = spec.mu_a.size();
  Dataset out;
  out.task = Task::classification;
  out.X.resize(n, d);
  out.y.resize(n);
  out.group.resize(static_cast<size_t>(n));

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution is_a(spec.c_a);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double thr_a = spec.mu_a.sum();
  const double thr_b = spec.mu_b.sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool a = is_a(rng);
    const auto& mu = a ? spec.mu_a : spec.mu_b;
    const auto& var = a ? spec.var_a : spec.var_b;
    for (Eigen::Index j = 0; j < d; ++j)
      out.X(i, j) = mu(j) + std::sqrt(var(j)) * unit(rng);
    out.y(i) = (out.X.row(i).sum() > (a ? thr_a : thr_b)) ? 1.0 : 0.0;
    out.group[static_cast<size_t>(i)] = a ? "A" : "B";
  }
  return out;
}

Dataset gen_mixture_scalar(double mu_a, double mu_b, double sigma2, double c_a, Eigen::Index n,
                           uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_mixture_scalar: n < 1");
  if (sigma2 <= 0.0) throw std::invalid_argument("gen_mixture_scalar: sigma2 <= 0");
  if (!(c_a >= 0.0 && c_a <= 1.0)) throw std::invalid_argument("gen_mixture_scalar: bad weight");
  Dataset out;
  out.task = Task::regression;
  out.X.resize(n, 0);
  out.y.resize(n);
  out.group.resize(static_cast<size_t>(n));
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution is_a(c_a);
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool a = is_a(rng);
    out.y(i) = (a ? mu_a : mu_b) + gauss(rng);
    out.group[static_cast<size_t>(i)] = a ? "A" : "B";
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return false;
  try {
    size_t pos = 0;
    v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size() && std::isfinite(v);
  } catch (...) {
    return false;
  }
}

}  // namespace

Dataset ingest_credit(const CreditPipelineSpec& spec) {
  std::ifstream in(spec.source_path);
  if (!in) throw std::runtime_error("ingest_credit: cannot open " + spec.source_path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest_credit: empty file");
  std::vector<std::string> header = split_csv_line(line);

  // An unnamed (or purely positional) leading index column is skipped.
  size_t first_col = 0;
  if (!header.empty() && (header[0].empty() || header[0] == "Unnamed: 0" || header[0] == "index"))
    first_col = 1;

  int target_idx = -1;
  std::vector<size_t> feature_cols;
  for (size_t j = first_col; j < header.size(); ++j) {
    if (header[j] == spec.target_column)
      target_idx = static_cast<int>(j);
    else
      feature_cols.push_back(j);
  }
  if (target_idx < 0)
    throw std::runtime_error("ingest_credit: target column '" + spec.target_column +
                             "' not found in " + spec.source_path);

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> targets;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) continue;  // malformed row: treat as missing
    double yv;
    if (!parse_number(cells[static_cast<size_t>(target_idx)], yv)) continue;
    if (yv != 0.0 && yv != 1.0)
      throw std::runtime_error("ingest_credit: non-binary target value in row");
    Eigen::VectorXd x(static_cast<Eigen::Index>(feature_cols.size()));
    bool ok = true;
    for (size_t j = 0; j < feature_cols.size(); ++j) {
      double v;
      if (!parse_number(cells[feature_cols[j]], v)) {
        ok = false;
        break;
      }
      x(static_cast<Eigen::Index>(j)) = v;
    }
    if (!ok) continue;  // drop rows with any missing numeric field
    rows.push_back(std::move(x));
    targets.push_back(yv);
  }
  if (rows.empty()) throw std::runtime_error("ingest_credit: no complete rows");

  std::vector<size_t> keep(rows.size());
  std::iota(keep.begin(), keep.end(), 0);
  if (spec.balance) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < targets.size(); ++i) (targets[i] == 1.0 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
      throw std::runtime_error("ingest_credit: cannot balance single-class data");
    std::mt19937_64 rng(spec.balance_seed);
    auto& majority = pos.size() > neg.size() ? pos : neg;
    const size_t target_count = std::min(pos.size(), neg.size());
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(target_count);
    keep.clear();
    keep.insert(keep.end(), pos.begin(), pos.end());
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());  // preserve file order for determinism
  }

  Dataset out;
  out.task = Task::classification;
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  const Eigen::Index d = rows[0].size();
  out.X.resize(n, d);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.X.row(i) = rows[keep[static_cast<size_t>(i)]].transpose();
    out.y(i) = targets[keep[static_cast<size_t>(i)]];
  }

  if (spec.standardize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double mean = out.X.col(j).mean();
      const double var = (out.X.col(j).array() - mean).square().sum() / static_cast<double>(n);
      const double sd = std::sqrt(var);
      if (sd <= 0.0) throw std::runtime_error("ingest_credit: constant feature column");
      out.X.col(j) = (out.X.col(j).array() - mean) / sd;
    }
  }
  out.validate();
  return out;
}

}  // namespace perf
