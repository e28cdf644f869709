#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptnet/adaptation.hpp"
#include "adaptnet/combiners.hpp"
#include "adaptnet/config.hpp"
#include "adaptnet/evo_game.hpp"
#include "adaptnet/metrics.hpp"
#include "adaptnet/theory_check.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet::experiments {

enum class Scenario { msd_compare, diffusion_sweep, ess_grid, theory_check };
Scenario scenario_from_name(const std::string& name);
std::string to_string(Scenario s);

struct TopologySpec {
  enum class Kind { random_geometric, circulant, grid_torus, edge_list };
  Kind kind = Kind::random_geometric;
  int nodes = 20;
  double radius = 0.4;
  std::uint64_t seed = 7;
  int retry_budget = 1000;
  std::vector<int> offsets;  // circulant; empty -> derive from degree
  int degree = 0;
  int rows = 10, cols = 10;
  std::filesystem::path path;  // edge_list
};

Topology build_topology(const TopologySpec& spec);

struct ExperimentConfig {
  Scenario scenario = Scenario::theory_check;
  std::uint64_t seed = 0;
  long long runs = 0;  // 0 -> scenario default
  int threads = 0;
  long long horizon = 3000;
  int steady_window = 100;

  TopologySpec topology;

  // signal
  int m = 5;
  std::vector<double> zeta;          // shared spectrum, defaults to 2s
  double mu = 0.01;
  std::vector<double> sigma2;        // per node; may come from span syntax
  std::optional<std::pair<double, double>> sigma2_span;
  std::vector<double> mu_per_node;   // optional

  // algorithms (msd_compare)
  std::vector<std::string> algorithms;
  double lambda_pow = 2.0;
  double lambda_exp = 1.0;
  double nu = 0.05;
  double beta_floor = 0.0;
  bool random_selection = false;
  rules::NeighborhoodSize neighborhood = rules::NeighborhoodSize::inclusive;

  // evolution (diffusion_sweep, ess_grid)
  double alpha = 0.01;
  double sigma_r2 = 1.5;
  std::vector<double> sigma_m2 = {0.2, 0.35, 0.5, 0.65, 0.8};
  std::vector<int> degrees = {4};
  std::vector<int> evo_nodes = {100};
  long long step_limit = 10000000;
  std::vector<evo::UpdateRule> rules = {evo::UpdateRule::im};
  enum class Normalization { sweep_max, point_max, none };
  Normalization normalization = Normalization::sweep_max;

  // ess_grid
  double init_sm_fraction = 0.95;
  double p_r0 = 0.1;
  long long snapshot_every = 2000;
  long long snapshot_run = 0;
  long long replicator_steps = 30000;
  double replicator_dt = 1e-3;

  // theory_check
  theory::TheoryCheckOptions theory;

  // provenance
  std::uint64_t config_fingerprint = 0;
  std::string config_origin = "<builtin>";

  // resolved per-node profiles for the filtering scenarios
  std::vector<NodeProfile> make_profiles(int node_count) const;
};

ExperimentConfig parse_experiment_config(const cfg::ConfigFile& file);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ScenarioResult {
  int exit_code = 0;  // 0 ok, 1 config, 2 identity failure, 3 topology
  std::string summary;
};

ScenarioResult run_msd_compare(const ExperimentConfig& config,
                               const std::filesystem::path& out_dir);
ScenarioResult run_diffusion_sweep(const ExperimentConfig& config,
                                   const std::filesystem::path& out_dir);
ScenarioResult run_ess_grid(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);
ScenarioResult run_theory_check(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);
ScenarioResult run_scenario(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir);

// --- pieces reused by tests -------------------------------------------------

// Combination policy roster entry names:
//   uniform | max_degree | laplacian | rel_degree | rel_degree_var |
//   metropolis | hastings | egt_im:<fitness> | egt_bd:<fitness> |
//   egt_db:<fitness> | error_aware_pow | error_aware_exp
std::unique_ptr<CombinerPolicy> make_policy(
    const std::string& name, const Topology& topo,
    std::span<const NodeProfile> profiles, const ExperimentConfig& config);

// One Monte Carlo run of one algorithm; per-node streams are derived from
// (seed, run, node), so every algorithm sees identical data.
metrics::RunCurve simulate_run(const Topology& topo,
                               std::span<const NodeProfile> profiles,
                               const std::string& algorithm,
                               const ExperimentConfig& config,
                               std::int64_t run_index);

struct AlgorithmOutcome {
  std::string name;
  metrics::AggregateResult aggregate;
  std::vector<double> run_steady_emse;  // per run, network steady EMSE
  std::vector<double> run_steady_msd;
};

AlgorithmOutcome run_algorithm(const Topology& topo,
                               std::span<const NodeProfile> profiles,
                               const std::string& algorithm,
                               const ExperimentConfig& config);

struct DiffusionPoint {
  int degree = 0;
  int nodes = 0;
  double sigma_m2 = 0.0;
  evo::UpdateRule rule = evo::UpdateRule::im;
  double norm_factor = 1.0;
  evo::FixationResult mc;
  evo::DiffusionPrediction theorem1;
  double kolmogorov_h = 0.0;
};

std::vector<DiffusionPoint> diffusion_sweep_points(
    const ExperimentConfig& config);

}  // namespace adaptnet::experiments
