#include "perf/config.hpp"

#include <doctest.h>

#include <algorithm>

using namespace perf;

namespace {

const char* kMinimalCustom = R"({
  "experiment": "custom",
  "objective": {"mode": "erm", "loss": {"family": "logistic", "lambda": 0.001}},
  "map": {"type": "strategic-generated", "epsilon_grid": [0.1], "strategic_indices": [0],
          "mixture": {"d": 2, "mu_a": 1.0, "mu_b": 0.8, "sigma": 0.3, "c_a": 0.8}}
})";

bool has_error_containing(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.errors.begin(), e.errors.end(), [&](const std::string& msg) {
    return msg.find(needle) != std::string::npos;
  });
}

template <typename Fn>
ConfigError capture(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError");
  return ConfigError({});
}

}  // namespace

TEST_CASE("validate_config basics") {
  SUBCASE("empty input names the missing experiment") {
    const ConfigError e = capture([] { validate_config("   \n"); });
    REQUIRE(e.errors.size() == 1);
    CHECK(e.errors[0] == "missing experiment");
  }
  SUBCASE("malformed JSON") {
    const ConfigError e = capture([] { validate_config("{nope"); });
    CHECK(has_error_containing(e, "not valid JSON"));
  }
  SUBCASE("unknown experiment value") {
    const ConfigError e = capture([] { validate_config(R"({"experiment": "什么"})"); });
    CHECK(has_error_containing(e, "experiment: unknown value"));
  }
  SUBCASE("minimal custom config parses") {
    const ExperimentConfig cfg = validate_config(kMinimalCustom);
    CHECK(cfg.experiment == ExperimentKind::custom);
    CHECK(cfg.objective.mode == ObjectiveMode::erm);
    CHECK(cfg.map.kind == MapKind::strategic_generated);
    CHECK(cfg.map.epsilon_grid == std::vector<double>{0.1});
    CHECK(cfg.methods == std::vector<std::string>{"rrm"});
  }
}

TEST_CASE("validate_config rejects unknown keys, recursively") {
  std::string text(kMinimalCustom);
  text.insert(text.rfind('}'), R"(, "mystery": 1)");
  ConfigError e = capture([&] { validate_config(text); });
  CHECK(has_error_containing(e, "mystery"));

  text = kMinimalCustom;
  text.insert(text.rfind("}}"), R"(, "typo_knob": 2)");  // inside map.mixture
  e = capture([&] { validate_config(text); });
  CHECK(has_error_containing(e, "typo_knob"));
}

TEST_CASE("validate_config aggregates errors with field paths") {
  const char* text = R"({
    "experiment": "custom",
    "objective": {"mode": "erm", "loss": {"family": "logistic", "lambda": -1}, "k": 0.5},
    "map": {"type": "strategic-generated", "epsilon_grid": [],
            "mixture": {"d": 2, "c_a": 0.6, "c_b": 0.6}},
    "loop": {"iterations": 0}
  })";
  const ConfigError e = capture([&] { validate_config(text); });
  CHECK(has_error_containing(e, "objective.loss.lambda"));
  CHECK(has_error_containing(e, "objective.k"));
  CHECK(has_error_containing(e, "map.epsilon_grid"));
  CHECK(has_error_containing(e, "weights must sum to 1"));
  CHECK(has_error_containing(e, "loop.iterations"));
  CHECK(e.errors.size() >= 5);
}

TEST_CASE("validate_config cross-field rules") {
  SUBCASE("rdro requires a DRO objective mode") {
    std::string text(kMinimalCustom);
    text.insert(text.rfind('}'), R"(, "methods": ["rrm", "rdro"])");
    const ConfigError e = capture([&] { validate_config(text); });
    CHECK(has_error_containing(e, "must be a DRO mode"));
  }
  SUBCASE("mean-shift maps take squared loss only") {
    const char* text = R"({
      "experiment": "custom",
      "objective": {"mode": "erm", "loss": {"family": "logistic", "lambda": 0.0}},
      "map": {"type": "mean-shift", "epsilon_grid": [0.0], "variants": ["D0"]},
      "loop": {"samples_per_round": 100}
    })";
    const ConfigError e = capture([&] { validate_config(text); });
    CHECK(has_error_containing(e, "mean-shift map requires squared loss"));
  }
  SUBCASE("strategic-fixed needs an existing credit csv") {
    const char* text = R"({
      "experiment": "custom",
      "objective": {"mode": "erm", "loss": {"family": "logistic", "lambda": 0.0}},
      "map": {"type": "strategic-fixed", "epsilon_grid": [0.1], "strategic_indices": [0]},
      "data": {"credit_csv": "/no/such/file.csv"}
    })";
    const ConfigError e = capture([&] { validate_config(text); });
    CHECK(has_error_containing(e, "does not exist"));
  }
  SUBCASE("samples_per_round 0 is reserved for strategic-fixed maps") {
    std::string text(kMinimalCustom);
    text.insert(text.rfind('}'), R"(, "loop": {"samples_per_round": 0})");
    const ConfigError e = capture([&] { validate_config(text); });
    CHECK(has_error_containing(e, "samples_per_round"));
  }
  SUBCASE("strategic index must fit the mixture dimension") {
    std::string text(kMinimalCustom);
    const size_t at = text.find("[0]");
    text.replace(at, 3, "[5]");
    const ConfigError e = capture([&] { validate_config(text); });
    CHECK(has_error_containing(e, "index out of range"));
  }
}

TEST_CASE("presets") {
  const std::vector<std::string> names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "regression-meanshift") != names.end());
  CHECK(std::find(names.begin(), names.end(), "classification-2d") != names.end());
  CHECK(std::find(names.begin(), names.end(), "fairness-10d") != names.end());
  CHECK(std::find(names.begin(), names.end(), "credit-strategic") != names.end());

  SUBCASE("every preset round-trips through validate_config") {
    for (const std::string& name : names) {
      if (name == "credit-strategic") continue;  // needs the csv on disk
      CHECK_NOTHROW(validate_config(preset_config_text(name)));
    }
  }
  SUBCASE("preset expansion fills defaults, user keys overlay them") {
    const ExperimentConfig base = validate_config(R"({"experiment": "regression-meanshift"})");
    CHECK(base.map.kind == MapKind::mean_shift);
    CHECK(base.map.variants.size() == 3);
    CHECK(base.objective.loss.family == LossFamily::squared);
    CHECK(base.theta0_intercept == 4.0);

    const ExperimentConfig tweaked = validate_config(
        R"({"experiment": "regression-meanshift", "loop": {"iterations": 3}, "seeds": [5, 6]})");
    CHECK(tweaked.iterations == 3);
    CHECK(tweaked.seeds == std::vector<uint64_t>{5, 6});
    CHECK(tweaked.map.variants.size() == 3);  // untouched preset field survives
  }
  SUBCASE("unknown preset name") {
    CHECK_THROWS(preset_config_text("no-such-preset"));
  }
}
