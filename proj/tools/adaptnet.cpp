// Experiment CLI: runs one scenario from a config file and writes CSV
// results. Exit codes: 0 success, 1 config error, 2 identity/acceptance
// failure, 3 placement or topology error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adaptnet/errors.hpp"
#include "adaptnet/experiments.hpp"
#include "adaptnet/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  long long runs = 0;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the master seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--runs", args.runs, "override the Monte Carlo run count");
  cmd->add_option("--threads", args.threads,
                  "worker threads (0 = all cores)");
}

int run(adaptnet::experiments::Scenario scenario, const CommonArgs& args) {
  using namespace adaptnet;
  experiments::ExperimentConfig config =
      experiments::load_experiment_config(args.config_path);
  if (config.scenario != scenario)
    throw ConfigError("config declares scenario '" +
                      experiments::to_string(config.scenario) +
                      "' but the command asked for '" +
                      experiments::to_string(scenario) + "'");
  if (args.seed_set) config.seed = args.seed;
  if (args.runs > 0) config.runs = args.runs;
  if (args.threads >= 0) config.threads = args.threads;

  const experiments::ScenarioResult result =
      experiments::run_scenario(config, args.out_dir);
  std::cout << result.summary;
  if (result.exit_code == 0)
    std::cout << "done; outputs in " << args.out_dir << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive-network simulation experiments"};
  app.set_version_flag("--version", adaptnet::kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  const std::pair<const char*, adaptnet::experiments::Scenario> scenarios[] = {
      {"msd_compare", adaptnet::experiments::Scenario::msd_compare},
      {"diffusion_sweep", adaptnet::experiments::Scenario::diffusion_sweep},
      {"ess_grid", adaptnet::experiments::Scenario::ess_grid},
      {"theory_check", adaptnet::experiments::Scenario::theory_check},
  };
  for (const auto& [name, scenario] : scenarios) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, args);
    const auto s = scenario;
    cmd->callback([&args, s] {
      const int code = run(s, args);
      if (code != 0) throw CLI::RuntimeError(code);
    });
  }

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const adaptnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const adaptnet::PlacementError& e) {
    std::cerr << "placement error: " << e.what() << "\n";
    return 3;
  } catch (const adaptnet::TopologyError& e) {
    std::cerr << "topology error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
