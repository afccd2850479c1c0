#include "perf/performative.hpp"

#include <cmath>

namespace perf {

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  // splitmix64 over the combined stream position
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Dataset sample_map(const DistributionMap& map, const LinearModel& theta, Eigen::Index n,
                   uint64_t seed) {
  return std::visit(
      [&](const auto& m) -> Dataset {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StrategicFixedBase>) {
          return sample_strategic(m.base, theta, m.spec, n, seed).dataset;
        } else if constexpr (std::is_same_v<T, StrategicGenerated>) {
          Dataset base = gen_group_threshold_data(m.gen, n, seed);
          return sample_strategic(base, theta, m.spec, n, mix_seed(seed, 0x5a5a)).dataset;
        } else {
          if (theta.d() != 0)
            throw std::invalid_argument("sample_map: mean-shift map needs a d=0 model");
          return sample_mean_shift(m.spec, theta.intercept, n, seed).dataset;
        }
      },
      map);
}

double theta_gap(const Eigen::VectorXd& theta_next, const Eigen::VectorXd& theta_curr,
                 const Eigen::VectorXd& theta0, const std::vector<int>& strategic_indices,
                 bool* degenerate) {
  const double raw = (theta_next - theta_curr).norm();
  double ref;
  if (strategic_indices.empty()) {
    ref = theta0.norm();
  } else {
    double acc = 0.0;
    for (int j : strategic_indices) {
      if (j < 0 || j >= theta0.size()) throw std::out_of_range("theta_gap: index out of range");
      acc += theta0(j) * theta0(j);
    }
    ref = std::sqrt(acc);
  }
  if (ref <= 1e-300) {
    if (degenerate) *degenerate = true;
    return raw;
  }
  if (degenerate) *degenerate = false;
  return raw / ref;
}

double iteration_bound(double omega, double eps, double beta, double gamma, double dist,
                       double delta) {
  if (delta <= 0.0 || dist <= 0.0) throw std::invalid_argument("iteration_bound: need dist, delta > 0");
  const double c = omega * eps * beta / gamma;
  if (c >= 1.0)
    throw std::domain_error("iteration_bound: contraction condition violated (no guarantee)");
  return std::log(dist / delta) / (1.0 - c);
}

ContractionDiagnostics contraction_diagnostics(const TrajectoryRecord& traj, double tolerance) {
  const auto& it = traj.iterations;
  if (it.size() < 3) throw std::invalid_argument("contraction_diagnostics: trajectory too short");
  ContractionDiagnostics d;
  double log_acc = 0.0;
  for (size_t t = 1; t < it.size(); ++t) {
    const double prev = (it[t - 1].theta - (t >= 2 ? it[t - 2].theta : it[t - 1].theta)).norm();
    const double cur = (it[t].theta - it[t - 1].theta).norm();
    if (t >= 2 && prev > 1e-12) {
      d.gap_ratios.push_back(cur / prev);
      log_acc += std::log(std::max(cur / prev, 1e-300));
    }
  }
  if (!d.gap_ratios.empty())
    d.geometric_mean_ratio = std::exp(log_acc / static_cast<double>(d.gap_ratios.size()));
  d.converged = !it.empty() && std::isfinite(it.back().theta_gap) && it.back().theta_gap < tolerance;
  return d;
}

double min_eta_dual(const LinearModel& m, const Dataset& data, const LossKind& loss,
                    const CressieReadSpec& spec) {
  const Eigen::VectorXd l = batch_losses(m, data, loss);
  double a = l.minCoeff() - 1.0, b = l.maxCoeff() + 1.0;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto F = [&](double eta) { return dro_dual_objective(m, data, loss, spec, eta); };
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = F(x1), f2 = F(x2);
  for (int r = 0; r < 200 && (b - a) > 1e-8; ++r) {
    if (f1 <= f2) { b = x2; x2 = x1; f2 = f1; x1 = b - invphi * (b - a); f1 = F(x1); }
    else { a = x1; x1 = x2; f1 = f2; x2 = a + invphi * (b - a); f2 = F(x2); }
  }
  return F(0.5 * (a + b));
}

double performative_risk_estimate(const LinearModel& theta, const DistributionMap& map,
                                  const ObjectiveSpec& objective, Eigen::Index n, uint64_t seed) {
  const Dataset induced = sample_map(map, theta, n, seed);
  switch (objective.mode) {
    case ObjectiveMode::erm:
      return erm_objective(theta, induced, objective.loss);
    case ObjectiveMode::dro_search_eta:
      return min_eta_dual(theta, induced, objective.loss, objective.cr);
    case ObjectiveMode::dro_fixed_eta:
      return dro_dual_objective(theta, induced, objective.loss, objective.cr, objective.fixed_eta);
  }
  throw std::logic_error("performative_risk_estimate: bad mode");
}

namespace {

std::vector<int> map_strategic_indices(const DistributionMap& map) {
  if (const auto* f = std::get_if<StrategicFixedBase>(&map)) return f->spec.strategic_indices;
  if (const auto* g = std::get_if<StrategicGenerated>(&map)) return g->spec.strategic_indices;
  return {};  // mean-shift: normalize by the full parameter vector
}

TrajectoryRecord run_loop(const LoopConfig& cfg, const LinearModel& theta0, bool dro) {
  if (cfg.iterations < 1 || cfg.samples_per_round < 1)
    throw std::invalid_argument("run_loop: bad LoopConfig");
  if (dro && cfg.objective.mode == ObjectiveMode::erm)
    throw std::invalid_argument("run_rdro: objective mode must be a DRO mode");
  if (!dro && cfg.objective.mode != ObjectiveMode::erm)
    throw std::invalid_argument("run_rrm: objective mode must be erm");

  TrajectoryRecord traj;
  const std::vector<int> gap_idx = map_strategic_indices(cfg.map);

  // Materialize generated strategic bases once per loop unless asked otherwise.
  DistributionMap map = cfg.map;
  if (const auto* g = std::get_if<StrategicGenerated>(&map); g && !g->fresh_per_round) {
    Dataset base = gen_group_threshold_data(g->gen, cfg.samples_per_round,
                                            mix_seed(cfg.seed, 0xba5eULL));
    map = StrategicFixedBase{std::move(base), g->spec};
  }

  // Gap normalization reference: theta0, or the first trained iterate when the
  // strategic part of theta0 is zero (flagged as degenerate normalization).
  Eigen::VectorXd theta_ref = theta_of(theta0);
  bool ref_degenerate = false;
  {
    bool deg = false;
    theta_gap(theta_ref, theta_ref, theta_ref, gap_idx, &deg);
    ref_degenerate = deg;
  }

  LinearModel current = theta0;
  const LinearModel cold = zero_model(theta0.d(), theta0.task);

  for (int t = 0; t < cfg.iterations; ++t) {
    IterationRecord rec;
    rec.t = t;
    const uint64_t sample_seed = mix_seed(cfg.seed, static_cast<uint64_t>(t), 1);
    const uint64_t deploy_seed = mix_seed(cfg.seed, static_cast<uint64_t>(t), 2);
    Dataset data = sample_map(map, current, cfg.samples_per_round, sample_seed);

    const LinearModel& init = cfg.warm_start ? current : cold;
    LinearModel next;
    GdConfig gd = cfg.gd;
    gd.seed = mix_seed(cfg.seed, static_cast<uint64_t>(t), 3);
    try {
      TrainReport rep;
      if (!dro) {
        rep = (cfg.method == TrainerMethod::backtracking)
                  ? train_backtracking(data, cfg.loss(), init, cfg.backtracking_iters)
                  : train_erm(data, cfg.loss(), gd, init);
      } else if (cfg.objective.mode == ObjectiveMode::dro_fixed_eta) {
        rep = train_dro_fixed_eta(data, cfg.loss(), cfg.objective.fixed_eta, gd, init);
        rec.eta = cfg.objective.fixed_eta;
      } else {
        rep = train_dro(data, cfg.loss(), cfg.objective.cr, cfg.eta_search, gd, init);
        if (rep.eta) rec.eta = *rep.eta;
      }
      next = rep.model;
    } catch (const DivergedError& e) {
      // Record how far the iterate ran away, then stop the loop (guard hit).
      rec.theta = theta_of(e.model);
      rec.diverged = true;
      rec.theta_gap = theta_gap(rec.theta, theta_of(current), theta_ref, gap_idx, nullptr);
      traj.iterations.push_back(rec);
      traj.diverged = true;
      traj.note = e.what();
      return traj;
    } catch (const BracketError& e) {
      // Eta-bracket failure: record where the loop stood and stop.
      rec.theta = theta_of(current);
      rec.theta_gap = std::numeric_limits<double>::quiet_NaN();
      traj.iterations.push_back(rec);
      traj.note = e.what();
      return traj;
    }

    rec.theta = theta_of(next);
    if (ref_degenerate && t == 0 && rec.theta.norm() > 0) {
      theta_ref = rec.theta;  // fall back to the first trained iterate
      traj.gap_normalization_degenerate = true;
    }
    bool deg = false;
    rec.theta_gap = theta_gap(rec.theta, theta_of(current), theta_ref, gap_idx, &deg);
    if (deg) traj.gap_normalization_degenerate = true;

    rec.sup_loss = erm_objective(next, data, cfg.loss());
    const Dataset deployed = sample_map(map, next, cfg.samples_per_round, deploy_seed);
    switch (cfg.objective.mode) {
      case ObjectiveMode::erm:
        rec.perf_loss = erm_objective(next, deployed, cfg.loss());
        break;
      case ObjectiveMode::dro_fixed_eta:
        rec.perf_loss = dro_dual_objective(next, deployed, cfg.loss(), cfg.objective.cr,
                                           cfg.objective.fixed_eta);
        break;
      case ObjectiveMode::dro_search_eta:
        rec.perf_loss = min_eta_dual(next, deployed, cfg.loss(), cfg.objective.cr);
        break;
    }
    if (deployed.task == Task::classification) {
      const GroupMetrics gm = evaluate(next, deployed, cfg.loss());
      rec.acc_all = gm.accuracy;
      if (auto it = gm.group_accuracy.find("A"); it != gm.group_accuracy.end())
        rec.acc_a = it->second;
      if (auto it = gm.group_accuracy.find("B"); it != gm.group_accuracy.end())
        rec.acc_b = it->second;
    }
    traj.iterations.push_back(rec);
    current = next;
  }
  return traj;
}

}  // namespace

TrajectoryRecord run_rrm(const LoopConfig& cfg, const LinearModel& theta0) {
  return run_loop(cfg, theta0, false);
}

TrajectoryRecord run_rdro(const LoopConfig& cfg, const LinearModel& theta0) {
  return run_loop(cfg, theta0, true);
}

}  // namespace perf
