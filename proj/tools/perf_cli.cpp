#include "perf/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"performative prediction experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seeds_csv;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config JSON file")->required();
  run->add_option("--out", out_dir, "override output directory");
  run->add_option("--seeds", seeds_csv, "override seeds, comma-separated");

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("config", config_path, "config JSON file")->required();

  auto* presets = app.add_subcommand("presets", "preset utilities");
  auto* presets_list = presets->add_subcommand("list", "list preset names");
  std::string preset_name;
  auto* presets_show = presets->add_subcommand("show", "print a preset's full config");
  presets_show->add_option("name", preset_name, "preset name")->required();
  presets->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets_list->parsed()) {
      for (const auto& n : perf::preset_names()) std::cout << n << '\n';
      return 0;
    }
    if (presets_show->parsed()) {
      std::cout << perf::preset_config_text(preset_name) << '\n';
      return 0;
    }

    std::string raw = read_file(config_path);
    if (validate->parsed()) {
      perf::validate_config(raw);
      std::cout << "config ok\n";
      return 0;
    }

    perf::ExperimentConfig cfg = perf::validate_config(raw);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!seeds_csv.empty()) {
      cfg.seeds.clear();
      std::stringstream ss(seeds_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.seeds.push_back(std::stoull(tok));
      if (cfg.seeds.empty()) throw std::runtime_error("--seeds: empty list");
    }
    const perf::RunResult res = perf::run_experiment(cfg, raw);
    int failed = 0;
    for (const auto& c : res.cells) {
      std::cout << c.method << ' ' << c.cell_key << " seed=" << c.seed << ": "
                << (c.ok ? "ok" : "FAILED") << (c.trajectory.diverged ? " (diverged)" : "");
      if (!c.ok) {
        std::cout << " — " << c.error;
        ++failed;
      }
      std::cout << '\n';
    }
    std::cout << "manifest: " << res.manifest_path << '\n';
    return failed == 0 ? 0 : 1;
  } catch (const perf::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
