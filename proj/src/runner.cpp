#include "perf/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace perf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cell {
  std::string method;
  std::string key;      // "epsX" or "D0"/"D1"/"D2"
  double epsilon = 0.0;
  MeanShiftVariant variant = MeanShiftVariant::D0;
  uint64_t seed = 0;
};

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string key_tag(double eps) {
  std::ostringstream os;
  os << "eps" << eps;
  std::string s = os.str();
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

LoopConfig build_loop_config(const ExperimentConfig& cfg, const Cell& cell, const Dataset* base) {
  LoopConfig lc;
  lc.iterations = cfg.iterations;
  lc.seed = mix_seed(cell.seed, fnv1a(cell.method + cell.key));
  lc.warm_start = cfg.warm_start;
  lc.objective = cfg.objective;
  const TrainerConfig* tr = &cfg.trainer;
  if (cell.method == "rrm") {
    lc.objective.mode = ObjectiveMode::erm;
  } else {
    if (cfg.rdro.has_trainer) tr = &cfg.rdro.trainer;
    if (cfg.rdro.has_warm_start) lc.warm_start = cfg.rdro.warm_start;
  }
  lc.method = tr->method;
  lc.gd.step = tr->step;
  lc.gd.epochs = tr->epochs;
  lc.gd.batch.full = tr->batch == 0;
  lc.gd.batch.size = tr->batch;
  lc.backtracking_iters = tr->backtracking_iters;
  lc.eta_search = tr->eta_search;

  StrategicMapSpec smap;
  smap.epsilon = cell.epsilon;
  smap.strategic_indices = cfg.map.strategic_indices;
  smap.bootstrap = cfg.map.bootstrap;
  switch (cfg.map.kind) {
    case MapKind::strategic_fixed: {
      lc.map = StrategicFixedBase{*base, smap};
      lc.samples_per_round = cfg.samples_per_round == 0 ? base->n() : cfg.samples_per_round;
      break;
    }
    case MapKind::strategic_generated: {
      GaussianMixtureSpec gm = fairness_mixture_defaults(cfg.map.d, cfg.map.mu_a, cfg.map.mu_b,
                                                         cfg.map.sigma, cfg.map.c_a);
      lc.map = StrategicGenerated{gm, smap};
      lc.samples_per_round = cfg.samples_per_round;
      break;
    }
    case MapKind::mean_shift: {
      MeanShiftMapSpec ms = cfg.map.mean_shift;
      ms.variant = cell.variant;
      lc.map = MeanShift{ms};
      lc.samples_per_round = cfg.samples_per_round;
      break;
    }
  }
  return lc;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& raw_config_text) {
  fs::create_directories(cfg.out_dir);

  const Dataset* base = nullptr;
  Dataset credit;
  if (cfg.map.kind == MapKind::strategic_fixed) {
    CreditPipelineSpec cp;
    cp.source_path = cfg.credit_csv;
    cp.target_column = cfg.target_column;
    credit = ingest_credit(cp);
    base = &credit;
  }

  std::vector<Cell> cells;
  for (const auto& method : cfg.methods) {
    if (cfg.map.kind == MapKind::mean_shift) {
      for (auto v : cfg.map.variants)
        for (uint64_t s : cfg.seeds) {
          Cell c;
          c.method = method;
          c.variant = v;
          c.key = v == MeanShiftVariant::D0 ? "D0" : v == MeanShiftVariant::D1 ? "D1" : "D2";
          c.seed = s;
          cells.push_back(c);
        }
    } else {
      for (double eps : cfg.map.epsilon_grid)
        for (uint64_t s : cfg.seeds) {
          Cell c;
          c.method = method;
          c.epsilon = eps;
          c.key = key_tag(eps);
          c.seed = s;
          cells.push_back(c);
        }
    }
  }

  RunResult result;
  result.cells.resize(cells.size());

  size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PERF_WORKERS")) {
    const long cap = std::atol(env);
    if (cap >= 1) workers = std::min(workers, static_cast<size_t>(cap));
  }
  workers = std::min(workers, cells.size());

  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      CellResult& out = result.cells[i];
      out.method = cell.method;
      out.cell_key = cell.key;
      out.seed = cell.seed;
      try {
        const LoopConfig lc = build_loop_config(cfg, cell, base);
        Eigen::Index d = 0;
        if (cfg.map.kind == MapKind::strategic_fixed) d = base->d();
        else if (cfg.map.kind == MapKind::strategic_generated) d = cfg.map.d;
        LinearModel theta0 = zero_model(
            d, cfg.map.kind == MapKind::mean_shift ? Task::regression : Task::classification);
        theta0.intercept = cfg.theta0_intercept;
        out.trajectory = (cell.method == "rrm") ? run_rrm(lc, theta0) : run_rdro(lc, theta0);
        if (cfg.map.kind == MapKind::mean_shift && !out.trajectory.iterations.empty())
          out.final_scalar_theta = out.trajectory.iterations.back().theta(0);
        const std::string path = cfg.out_dir + "/traj_" + cell.method + "_" + cell.key +
                                 "_seed" + std::to_string(cell.seed) + ".csv";
        emit_csv(out.trajectory, path);
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // Summary table: one row per cell with final metrics.
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : result.cells) {
    std::string gap = "nan", acc_all = "nan", acc_a = "nan", acc_b = "nan", theta = "nan";
    if (!c.trajectory.iterations.empty()) {
      const auto& last = c.trajectory.iterations.back();
      gap = format_g17(last.theta_gap);
      acc_all = format_g17(last.acc_all);
      acc_a = format_g17(last.acc_a);
      acc_b = format_g17(last.acc_b);
      if (cfg.map.kind == MapKind::mean_shift) theta = format_g17(c.final_scalar_theta);
    }
    rows.push_back({c.method, c.cell_key, std::to_string(c.seed), c.ok ? "ok" : "failed", gap,
                    acc_all, acc_a, acc_b, theta,
                    c.trajectory.diverged ? "diverged" : "",
                    c.error});
  }
  emit_csv_table({"method", "cell", "seed", "status", "final_theta_gap", "acc_all", "acc_A",
                  "acc_B", "final_theta", "divergence", "error"},
                 rows, cfg.out_dir + "/summary.csv");

  // Theta-gap overlay per method: one series per cell key (first seed).
  for (const auto& method : cfg.methods) {
    std::vector<SvgSeries> series;
    for (const auto& c : result.cells) {
      if (c.method != method || c.seed != cfg.seeds.front() || !c.ok) continue;
      SvgSeries s;
      s.name = c.cell_key;
      for (const auto& it : c.trajectory.iterations) {
        s.x.push_back(it.t);
        s.y.push_back(it.theta_gap);
      }
      series.push_back(std::move(s));
    }
    if (!series.empty())
      emit_svg_lines(series, cfg.out_dir + "/theta_gap_" + method + ".svg",
                     "normalized theta gap (" + method + ")", "iteration", "theta gap", true);
  }

  result.all_ok = true;
  json manifest;
  manifest["version"] = "0.1.0";
  manifest["config_hash"] = fnv1a(raw_config_text);
  manifest["config"] = raw_config_text;
  manifest["seeds"] = cfg.seeds;
  json cell_status = json::array();
  for (const auto& c : result.cells) {
    cell_status.push_back({{"method", c.method},
                           {"cell", c.cell_key},
                           {"seed", c.seed},
                           {"status", c.ok ? "ok" : "failed"},
                           {"error", c.error}});
    if (!c.ok) result.all_ok = false;
  }
  manifest["cells"] = cell_status;
  result.manifest_path = cfg.out_dir + "/manifest.json";
  std::ofstream mf(result.manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write manifest: " + result.manifest_path);
  mf << manifest.dump(2) << '\n';
  return result;
}

}  // namespace perf
