#include "perf/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <sstream>

namespace perf {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&errs] {
        std::ostringstream os;
        os << "config validation failed:";
        for (const auto& e : errs) os << "\n  - " << e;
        return os.str();
      }()),
      errors(std::move(errs)) {}

namespace {

struct Check {
  std::vector<std::string>& errors;

  void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!known.count(it.key())) errors.push_back(path + it.key() + ": unknown key");
  }
  bool require(bool cond, const std::string& msg) {
    if (!cond) errors.push_back(msg);
    return cond;
  }
  template <typename T>
  bool get(const json& obj, const std::string& path, const std::string& key, T& out,
           bool required = false) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(path + key + ": missing");
      return false;
    }
    try {
      out = obj.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      errors.push_back(path + key + ": wrong type");
      return false;
    }
  }
};

const std::set<std::string> kTopKeys = {"experiment", "objective", "map",  "loop",   "trainer",
                                        "rdro",       "methods",   "seeds", "data",  "out_dir"};
const std::set<std::string> kObjectiveKeys = {"mode", "loss", "k", "rho", "eta"};
const std::set<std::string> kLossKeys = {"family", "lambda"};
const std::set<std::string> kMapKeys = {"type",    "epsilon_grid", "strategic_indices",
                                        "bootstrap", "mixture",    "variants", "mean_shift"};
const std::set<std::string> kMixtureKeys = {"d", "mu_a", "mu_b", "sigma", "c_a", "c_b"};
const std::set<std::string> kMeanShiftKeys = {"mu_a", "mu_b", "sigma2", "c_a", "c_b"};
const std::set<std::string> kLoopKeys = {"iterations", "samples_per_round", "warm_start",
                                         "theta0_intercept"};
const std::set<std::string> kTrainerKeys = {"method", "step",       "epochs",
                                            "batch",  "backtracking_iters", "eta_search"};
const std::set<std::string> kEtaSearchKeys = {"lo", "hi", "auto_bracket", "max_rounds", "tolerance"};
const std::set<std::string> kRdroKeys = {"trainer", "warm_start"};
const std::set<std::string> kDataKeys = {"credit_csv", "target_column"};

TrainerConfig parse_trainer(const json& j, const std::string& path, Check& ck) {
  TrainerConfig t;
  ck.unknown_keys(j, path, kTrainerKeys);
  std::string method;
  if (ck.get(j, path, "method", method)) {
    if (method == "fixed-step") t.method = TrainerMethod::fixed_step;
    else if (method == "backtracking") t.method = TrainerMethod::backtracking;
    else ck.errors.push_back(path + "method: must be 'fixed-step' or 'backtracking'");
  }
  ck.get(j, path, "step", t.step);
  ck.get(j, path, "epochs", t.epochs);
  ck.get(j, path, "batch", t.batch);
  ck.get(j, path, "backtracking_iters", t.backtracking_iters);
  ck.require(t.step > 0.0, path + "step: must be > 0");
  ck.require(t.epochs >= 1, path + "epochs: must be >= 1");
  ck.require(t.batch >= 0, path + "batch: must be >= 0 (0 = full)");
  if (j.is_object() && j.contains("eta_search")) {
    const json& es = j.at("eta_search");
    const std::string ep = path + "eta_search.";
    ck.unknown_keys(es, ep, kEtaSearchKeys);
    ck.get(es, ep, "lo", t.eta_search.lo);
    ck.get(es, ep, "hi", t.eta_search.hi);
    ck.get(es, ep, "auto_bracket", t.eta_search.auto_bracket);
    ck.get(es, ep, "max_rounds", t.eta_search.max_rounds);
    ck.get(es, ep, "tolerance", t.eta_search.tolerance);
    ck.require(t.eta_search.tolerance > 0, ep + "tolerance: must be > 0");
    ck.require(t.eta_search.max_rounds >= 1, ep + "max_rounds: must be >= 1");
    if (!t.eta_search.auto_bracket)
      ck.require(t.eta_search.lo < t.eta_search.hi, ep + "lo/hi: need lo < hi");
  }
  return t;
}

json deep_merge(json base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) return overlay;
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()))
      base[it.key()] = deep_merge(base.at(it.key()), it.value());
    else
      base[it.key()] = it.value();
  }
  return base;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"credit-strategic", "regression-meanshift", "classification-2d", "fairness-10d"};
}

std::string preset_config_text(const std::string& name) {
  json j;
  j["experiment"] = name;
  if (name == "credit-strategic") {
    j["objective"] = {{"mode", "dro-search-eta"},
                      {"loss", {{"family", "logistic"}, {"lambda", 0.0001}}},
                      {"k", 2.0},
                      {"rho", 1.0}};
    j["map"] = {{"type", "strategic-fixed"},
                {"epsilon_grid", {0.01, 0.1, 1.0, 10.0, 100.0}},
                {"strategic_indices", {0, 1, 2}},
                {"bootstrap", false}};
    j["loop"] = {{"iterations", 30}, {"samples_per_round", 0}, {"warm_start", true},
                 {"theta0_intercept", 0.0}};
    j["trainer"] = {{"method", "fixed-step"}, {"step", 0.03}, {"epochs", 5000}, {"batch", 0},
                    {"eta_search", {{"auto_bracket", true}, {"max_rounds", 40}, {"tolerance", 1e-3}}}};
    j["methods"] = {"rrm", "rdro"};
    j["seeds"] = {1};
    j["data"] = {{"credit_csv", "data/cs-training.csv"}, {"target_column", "SeriousDlqin2yrs"}};
  } else if (name == "regression-meanshift") {
    j["objective"] = {{"mode", "dro-search-eta"},
                      {"loss", {{"family", "squared"}, {"lambda", 0.0}}},
                      {"k", 2.0},
                      {"rho", 4.0}};
    j["map"] = {{"type", "mean-shift"},
                {"variants", {"D0", "D1", "D2"}},
                {"mean_shift", {{"mu_a", 4.0}, {"mu_b", 4.0}, {"sigma2", 0.01},
                                {"c_a", 0.2}, {"c_b", 0.8}}}};
    j["loop"] = {{"iterations", 50}, {"samples_per_round", 2000}, {"warm_start", true},
                 {"theta0_intercept", 4.0}};
    j["trainer"] = {{"method", "backtracking"}, {"step", 0.01}, {"epochs", 150},
                    {"backtracking_iters", 500}};
    j["rdro"] = {{"trainer", {{"method", "fixed-step"}, {"step", 0.01}, {"epochs", 70},
                              {"eta_search", {{"auto_bracket", true}, {"max_rounds", 40},
                                              {"tolerance", 1e-3}}}}}};
    j["methods"] = {"rrm", "rdro"};
    j["seeds"] = {7};
  } else if (name == "classification-2d") {
    j["objective"] = {{"mode", "dro-fixed-eta"},
                      {"loss", {{"family", "logistic"}, {"lambda", 0.0001}}},
                      {"eta", 0.56}};
    j["map"] = {{"type", "strategic-generated"},
                {"epsilon_grid", {0.0}},
                {"strategic_indices", json::array()},
                {"mixture", {{"d", 2}, {"mu_a", 1.0}, {"mu_b", 0.7},
                             {"sigma", 0.31622776601683794}, {"c_a", 0.95}, {"c_b", 0.05}}}};
    j["loop"] = {{"iterations", 1}, {"samples_per_round", 10000}, {"warm_start", true},
                 {"theta0_intercept", 0.0}};
    j["trainer"] = {{"method", "fixed-step"}, {"step", 0.05}, {"epochs", 15000}, {"batch", 0}};
    j["rdro"] = {{"trainer", {{"method", "fixed-step"}, {"step", 0.05}, {"epochs", 225}}}};
    j["methods"] = {"rrm", "rdro"};
    j["seeds"] = {11};
  } else if (name == "fairness-10d") {
    j["objective"] = {{"mode", "dro-fixed-eta"},
                      {"loss", {{"family", "logistic"}, {"lambda", 0.0001}}},
                      {"eta", 0.56}};
    j["map"] = {{"type", "strategic-generated"},
                {"epsilon_grid", {0.01, 0.25, 0.5, 10.0}},
                {"strategic_indices", {0, 1, 2, 3, 4}},
                {"mixture", {{"d", 10}, {"mu_a", 1.0}, {"mu_b", 0.8},
                             {"sigma", 0.31622776601683794}, {"c_a", 0.8}, {"c_b", 0.2}}}};
    j["loop"] = {{"iterations", 30}, {"samples_per_round", 1200}, {"warm_start", true},
                 {"theta0_intercept", 0.0}};
    j["trainer"] = {{"method", "fixed-step"}, {"step", 0.2}, {"epochs", 8000}, {"batch", 0}};
    j["rdro"] = {{"warm_start", false},
                 {"trainer", {{"method", "fixed-step"}, {"step", 0.2}, {"epochs", 150}}}};
    j["methods"] = {"rrm", "rdro"};
    j["seeds"] = {101, 202, 303};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  j["out_dir"] = "out";
  return j.dump(2);
}

ExperimentConfig validate_config(const std::string& raw_text) {
  std::vector<std::string> errors;
  {
    std::string trimmed = raw_text;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) throw ConfigError({"missing experiment"});
  }
  json j;
  try {
    j = json::parse(raw_text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"top level must be a JSON object"});
  if (!j.contains("experiment")) throw ConfigError({"experiment: missing"});

  Check ck{errors};
  ExperimentConfig cfg;
  std::string exp;
  ck.get(j, "", "experiment", exp, true);
  static const std::set<std::string> kinds = {"credit-strategic", "regression-meanshift",
                                              "classification-2d", "fairness-10d", "custom"};
  if (!kinds.count(exp)) throw ConfigError({"experiment: unknown value '" + exp + "'"});

  // Presets expand to full defaults, then user keys overlay them.
  if (exp != "custom") j = deep_merge(json::parse(preset_config_text(exp)), j);

  cfg.experiment = exp == "credit-strategic"      ? ExperimentKind::credit_strategic
                   : exp == "regression-meanshift" ? ExperimentKind::regression_meanshift
                   : exp == "classification-2d"    ? ExperimentKind::classification_2d
                   : exp == "fairness-10d"         ? ExperimentKind::fairness_10d
                                                   : ExperimentKind::custom;

  ck.unknown_keys(j, "", kTopKeys);

  if (j.contains("objective")) {
    const json& o = j.at("objective");
    ck.unknown_keys(o, "objective.", kObjectiveKeys);
    std::string mode;
    if (ck.get(o, "objective.", "mode", mode, true)) {
      if (mode == "erm") cfg.objective.mode = ObjectiveMode::erm;
      else if (mode == "dro-search-eta") cfg.objective.mode = ObjectiveMode::dro_search_eta;
      else if (mode == "dro-fixed-eta") cfg.objective.mode = ObjectiveMode::dro_fixed_eta;
      else ck.errors.push_back("objective.mode: unknown value '" + mode + "'");
    }
    if (o.contains("loss")) {
      const json& l = o.at("loss");
      ck.unknown_keys(l, "objective.loss.", kLossKeys);
      std::string fam;
      if (ck.get(l, "objective.loss.", "family", fam, true)) {
        if (fam == "logistic") cfg.objective.loss.family = LossFamily::logistic;
        else if (fam == "squared") cfg.objective.loss.family = LossFamily::squared;
        else ck.errors.push_back("objective.loss.family: unknown value '" + fam + "'");
      }
      ck.get(l, "objective.loss.", "lambda", cfg.objective.loss.lambda);
      ck.require(cfg.objective.loss.lambda >= 0, "objective.loss.lambda: must be >= 0");
    } else {
      ck.errors.push_back("objective.loss: missing");
    }
    ck.get(o, "objective.", "k", cfg.objective.cr.k);
    ck.get(o, "objective.", "rho", cfg.objective.cr.rho);
    ck.get(o, "objective.", "eta", cfg.objective.fixed_eta);
    ck.require(cfg.objective.cr.k > 1.0, "objective.k: must be > 1");
    ck.require(cfg.objective.cr.rho >= 0.0, "objective.rho: must be >= 0");
  } else {
    ck.errors.push_back("objective: missing");
  }

  if (j.contains("map")) {
    const json& m = j.at("map");
    ck.unknown_keys(m, "map.", kMapKeys);
    std::string type;
    if (ck.get(m, "map.", "type", type, true)) {
      if (type == "strategic-fixed") cfg.map.kind = MapKind::strategic_fixed;
      else if (type == "strategic-generated") cfg.map.kind = MapKind::strategic_generated;
      else if (type == "mean-shift") cfg.map.kind = MapKind::mean_shift;
      else ck.errors.push_back("map.type: unknown value '" + type + "'");
    }
    ck.get(m, "map.", "epsilon_grid", cfg.map.epsilon_grid);
    ck.get(m, "map.", "strategic_indices", cfg.map.strategic_indices);
    ck.get(m, "map.", "bootstrap", cfg.map.bootstrap);
    if (m.contains("mixture")) {
      const json& mx = m.at("mixture");
      ck.unknown_keys(mx, "map.mixture.", kMixtureKeys);
      double c_b = 1.0 - cfg.map.c_a;
      ck.get(mx, "map.mixture.", "d", cfg.map.d);
      ck.get(mx, "map.mixture.", "mu_a", cfg.map.mu_a);
      ck.get(mx, "map.mixture.", "mu_b", cfg.map.mu_b);
      ck.get(mx, "map.mixture.", "sigma", cfg.map.sigma);
      ck.get(mx, "map.mixture.", "c_a", cfg.map.c_a);
      if (ck.get(mx, "map.mixture.", "c_b", c_b))
        ck.require(std::abs(cfg.map.c_a + c_b - 1.0) <= 1e-12,
                   "map.mixture.c_a/c_b: weights must sum to 1");
      ck.require(cfg.map.d >= 1, "map.mixture.d: must be >= 1");
      ck.require(cfg.map.sigma > 0, "map.mixture.sigma: must be > 0");
      ck.require(cfg.map.c_a > 0 && cfg.map.c_a < 1, "map.mixture.c_a: must be in (0,1)");
    }
    if (m.contains("variants")) {
      std::vector<std::string> vs;
      if (ck.get(m, "map.", "variants", vs)) {
        cfg.map.variants.clear();
        for (const auto& v : vs) {
          if (v == "D0") cfg.map.variants.push_back(MeanShiftVariant::D0);
          else if (v == "D1") cfg.map.variants.push_back(MeanShiftVariant::D1);
          else if (v == "D2") cfg.map.variants.push_back(MeanShiftVariant::D2);
          else ck.errors.push_back("map.variants: unknown variant '" + v + "'");
        }
        ck.require(!cfg.map.variants.empty(), "map.variants: must be non-empty");
      }
    }
    if (m.contains("mean_shift")) {
      const json& ms = m.at("mean_shift");
      ck.unknown_keys(ms, "map.mean_shift.", kMeanShiftKeys);
      ck.get(ms, "map.mean_shift.", "mu_a", cfg.map.mean_shift.mu_a);
      ck.get(ms, "map.mean_shift.", "mu_b", cfg.map.mean_shift.mu_b);
      ck.get(ms, "map.mean_shift.", "sigma2", cfg.map.mean_shift.sigma2);
      ck.get(ms, "map.mean_shift.", "c_a", cfg.map.mean_shift.c_a);
      ck.get(ms, "map.mean_shift.", "c_b", cfg.map.mean_shift.c_b);
      ck.require(cfg.map.mean_shift.sigma2 > 0, "map.mean_shift.sigma2: must be > 0");
      ck.require(std::abs(cfg.map.mean_shift.c_a + cfg.map.mean_shift.c_b - 1.0) <= 1e-12,
                 "map.mean_shift.c_a/c_b: weights must sum to 1");
    }
    ck.require(!cfg.map.epsilon_grid.empty(), "map.epsilon_grid: must be non-empty");
    for (double e : cfg.map.epsilon_grid)
      ck.require(e >= 0.0, "map.epsilon_grid: entries must be >= 0");
    for (int ix : cfg.map.strategic_indices)
      ck.require(ix >= 0, "map.strategic_indices: entries must be >= 0");
  } else {
    ck.errors.push_back("map: missing");
  }

  if (j.contains("loop")) {
    const json& l = j.at("loop");
    ck.unknown_keys(l, "loop.", kLoopKeys);
    ck.get(l, "loop.", "iterations", cfg.iterations);
    long long n = static_cast<long long>(cfg.samples_per_round);
    if (ck.get(l, "loop.", "samples_per_round", n)) cfg.samples_per_round = n;
    ck.get(l, "loop.", "warm_start", cfg.warm_start);
    ck.get(l, "loop.", "theta0_intercept", cfg.theta0_intercept);
    ck.require(cfg.iterations >= 1, "loop.iterations: must be >= 1");
    ck.require(cfg.samples_per_round >= 0, "loop.samples_per_round: must be >= 0 (0 = full base)");
  }

  if (j.contains("trainer")) cfg.trainer = parse_trainer(j.at("trainer"), "trainer.", ck);
  if (j.contains("rdro")) {
    const json& r = j.at("rdro");
    ck.unknown_keys(r, "rdro.", kRdroKeys);
    if (r.contains("trainer")) {
      cfg.rdro.trainer = parse_trainer(r.at("trainer"), "rdro.trainer.", ck);
      cfg.rdro.has_trainer = true;
    }
    if (ck.get(r, "rdro.", "warm_start", cfg.rdro.warm_start)) cfg.rdro.has_warm_start = true;
  }

  if (j.contains("methods")) {
    ck.get(j, "", "methods", cfg.methods);
    ck.require(!cfg.methods.empty(), "methods: must be non-empty");
    for (const auto& m : cfg.methods)
      ck.require(m == "rrm" || m == "rdro", "methods: unknown method '" + m + "'");
  }
  if (j.contains("seeds")) {
    ck.get(j, "", "seeds", cfg.seeds);
    ck.require(!cfg.seeds.empty(), "seeds: must be non-empty");
  }
  if (j.contains("data")) {
    const json& d = j.at("data");
    ck.unknown_keys(d, "data.", kDataKeys);
    ck.get(d, "data.", "credit_csv", cfg.credit_csv);
    ck.get(d, "data.", "target_column", cfg.target_column);
  }
  ck.get(j, "", "out_dir", cfg.out_dir);

  // Cross-field checks.
  const bool wants_rdro =
      std::find(cfg.methods.begin(), cfg.methods.end(), "rdro") != cfg.methods.end();
  if (wants_rdro && cfg.objective.mode == ObjectiveMode::erm)
    ck.errors.push_back("objective.mode: must be a DRO mode when methods include 'rdro'");
  if (cfg.map.kind == MapKind::mean_shift && cfg.objective.loss.family != LossFamily::squared)
    ck.errors.push_back("objective.loss.family: mean-shift map requires squared loss");
  if (cfg.map.kind != MapKind::mean_shift && cfg.objective.loss.family != LossFamily::logistic)
    ck.errors.push_back("objective.loss.family: strategic maps require logistic loss");
  if (cfg.map.kind == MapKind::strategic_fixed) {
    if (cfg.credit_csv.empty())
      ck.errors.push_back("data.credit_csv: required for strategic-fixed maps");
    else if (!std::filesystem::exists(cfg.credit_csv))
      ck.errors.push_back("data.credit_csv: file does not exist: " + cfg.credit_csv);
  }
  if (cfg.samples_per_round == 0 && cfg.map.kind != MapKind::strategic_fixed)
    ck.errors.push_back("loop.samples_per_round: 0 (full base) only valid for strategic-fixed maps");
  if (cfg.map.kind == MapKind::strategic_generated)
    for (int ix : cfg.map.strategic_indices)
      ck.require(ix < cfg.map.d, "map.strategic_indices: index out of range for mixture d");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace perf
