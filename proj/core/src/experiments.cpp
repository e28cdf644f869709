#include "adaptnet/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaptnet/egt_combiners.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/parallel.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/signal_model.hpp"
#include "adaptnet/version.hpp"

namespace adaptnet::experiments {

Scenario scenario_from_name(const std::string& name) {
  if (name == "msd_compare") return Scenario::msd_compare;
  if (name == "diffusion_sweep") return Scenario::diffusion_sweep;
  if (name == "ess_grid") return Scenario::ess_grid;
  if (name == "theory_check") return Scenario::theory_check;
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::msd_compare: return "msd_compare";
    case Scenario::diffusion_sweep: return "diffusion_sweep";
    case Scenario::ess_grid: return "ess_grid";
    case Scenario::theory_check: return "theory_check";
  }
  return "?";
}

Topology build_topology(const TopologySpec& spec) {
  switch (spec.kind) {
    case TopologySpec::Kind::random_geometric:
      return random_geometric(spec.nodes, spec.radius, spec.seed,
                              spec.retry_budget)
          .topology;
    case TopologySpec::Kind::circulant:
      if (!spec.offsets.empty())
        return regular_circulant(spec.nodes, spec.offsets);
      return circulant_of_degree(spec.nodes, spec.degree);
    case TopologySpec::Kind::grid_torus:
      return grid_torus(spec.rows, spec.cols);
    case TopologySpec::Kind::edge_list:
      return Topology::load_edge_list(spec.path);
  }
  throw ConfigError("unknown topology kind");
}

namespace {

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"experiment",
       {"scenario", "seed", "runs", "threads", "horizon", "steady_window"}},
      {"topology",
       {"kind", "nodes", "radius", "seed", "retry_budget", "offsets", "degree",
        "rows", "cols", "path"}},
      {"signal", {"m", "zeta", "mu", "sigma2", "sigma2_span", "mu_per_node"}},
      {"algorithms",
       {"list", "lambda_pow", "lambda_exp", "nu", "beta_floor",
        "random_selection", "neighborhood"}},
      {"evo",
       {"alpha", "sigma_r2", "sigma_m2", "degrees", "nodes", "step_limit",
        "rules", "normalization"}},
      {"ess",
       {"init_sm_fraction", "p_r0", "snapshot_every", "snapshot_run",
        "replicator_steps", "replicator_dt"}},
      {"theory",
       {"seed", "draws", "topologies", "max_nodes", "n_min", "n_max",
        "xi2_offset"}},
  };
  return schema;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.erase(item.begin());
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.pop_back();
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(x));
  return buf;
}

void write_provenance(std::ostream& out, const ExperimentConfig& c) {
  out << "# adaptnet " << kVersion << " scenario=" << to_string(c.scenario)
      << " seed=" << c.seed << " config_fnv1a=" << hex64(c.config_fingerprint)
      << " origin=" << c.config_origin << "\n";
}

std::ofstream open_csv(const std::filesystem::path& path,
                       const ExperimentConfig& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  write_provenance(out, c);
  return out;
}

}  // namespace

std::vector<NodeProfile> ExperimentConfig::make_profiles(
    int node_count) const {
  std::vector<NodeProfile> profiles(node_count);

  std::vector<double> variances;
  if (!sigma2.empty()) {
    if (static_cast<int>(sigma2.size()) == node_count)
      variances = sigma2;
    else if (sigma2.size() == 1)
      variances.assign(node_count, sigma2[0]);
    else
      throw ConfigError("sigma2 list must have 1 or N entries, got " +
                        std::to_string(sigma2.size()));
  } else if (sigma2_span) {
    const auto [lo, hi] = *sigma2_span;
    for (int i = 0; i < node_count; ++i)
      variances.push_back(
          node_count == 1 ? lo : lo + (hi - lo) * i / (node_count - 1.0));
  } else {
    variances.assign(node_count, 1.0);
  }

  std::vector<double> steps;
  if (!mu_per_node.empty()) {
    if (static_cast<int>(mu_per_node.size()) != node_count)
      throw ConfigError("mu_per_node must have N entries");
    steps = mu_per_node;
  } else {
    steps.assign(node_count, mu);
  }

  std::vector<double> spectrum = zeta;
  if (spectrum.empty()) spectrum.assign(m, 2.0);
  if (static_cast<int>(spectrum.size()) != m)
    throw ConfigError("zeta must have m entries");

  for (int i = 0; i < node_count; ++i) {
    profiles[i].noise_variance = variances[i];
    profiles[i].step_size = steps[i];
    profiles[i].regressor_spectrum = spectrum;
    profiles[i].validate();
  }
  return profiles;
}

ExperimentConfig parse_experiment_config(const cfg::ConfigFile& file) {
  file.require_known(config_schema());
  ExperimentConfig c;
  c.config_fingerprint = file.fingerprint();
  c.config_origin = file.origin();

  c.scenario = scenario_from_name(file.get_string("experiment", "scenario"));
  c.seed = file.get_u64("experiment", "seed");  // mandatory, no wall clock
  c.runs = file.get_int("experiment", "runs", 0);
  c.threads = static_cast<int>(file.get_int("experiment", "threads", 0));
  c.horizon = file.get_int("experiment", "horizon", 3000);
  c.steady_window =
      static_cast<int>(file.get_int("experiment", "steady_window", 100));
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.steady_window < 1 || c.steady_window > c.horizon)
    throw ConfigError("steady_window must be within the horizon");

  const std::string kind =
      file.get_string("topology", "kind",
                      c.scenario == Scenario::ess_grid ? "grid_torus"
                                                       : "random_geometric");
  if (kind == "random_geometric")
    c.topology.kind = TopologySpec::Kind::random_geometric;
  else if (kind == "circulant")
    c.topology.kind = TopologySpec::Kind::circulant;
  else if (kind == "grid_torus")
    c.topology.kind = TopologySpec::Kind::grid_torus;
  else if (kind == "edge_list")
    c.topology.kind = TopologySpec::Kind::edge_list;
  else
    throw ConfigError("unknown topology kind '" + kind + "'");
  c.topology.nodes =
      static_cast<int>(file.get_int("topology", "nodes", c.topology.nodes));
  c.topology.radius = file.get_double("topology", "radius", c.topology.radius);
  if (file.has("topology", "seed"))
    c.topology.seed = file.get_u64("topology", "seed");
  c.topology.retry_budget = static_cast<int>(
      file.get_int("topology", "retry_budget", c.topology.retry_budget));
  if (file.has("topology", "offsets"))
    c.topology.offsets = file.get_int_list("topology", "offsets");
  c.topology.degree =
      static_cast<int>(file.get_int("topology", "degree", c.topology.degree));
  c.topology.rows =
      static_cast<int>(file.get_int("topology", "rows", c.topology.rows));
  c.topology.cols =
      static_cast<int>(file.get_int("topology", "cols", c.topology.cols));
  if (file.has("topology", "path"))
    c.topology.path = file.get_string("topology", "path");

  c.m = static_cast<int>(file.get_int("signal", "m", 5));
  if (c.m < 1) throw ConfigError("m must be >= 1");
  if (file.has("signal", "zeta"))
    c.zeta = file.get_double_list("signal", "zeta");
  c.mu = file.get_double("signal", "mu", 0.01);
  if (file.has("signal", "sigma2"))
    c.sigma2 = file.get_double_list("signal", "sigma2");
  if (file.has("signal", "sigma2_span")) {
    const auto span = file.get_double_list("signal", "sigma2_span");
    if (span.size() != 2)
      throw ConfigError("sigma2_span must be 'low,high'");
    c.sigma2_span = {span[0], span[1]};
  }
  if (file.has("signal", "mu_per_node"))
    c.mu_per_node = file.get_double_list("signal", "mu_per_node");

  if (file.has("algorithms", "list"))
    c.algorithms = split_names(file.get_string("algorithms", "list"));
  c.lambda_pow = file.get_double("algorithms", "lambda_pow", 2.0);
  c.lambda_exp = file.get_double("algorithms", "lambda_exp", 1.0);
  c.nu = file.get_double("algorithms", "nu", 0.05);
  c.beta_floor = file.get_double("algorithms", "beta_floor", 0.0);
  c.random_selection =
      file.get_bool("algorithms", "random_selection", false);
  const std::string nbh =
      file.get_string("algorithms", "neighborhood", "inclusive");
  if (nbh == "inclusive")
    c.neighborhood = rules::NeighborhoodSize::inclusive;
  else if (nbh == "exclusive")
    c.neighborhood = rules::NeighborhoodSize::exclusive;
  else
    throw ConfigError("neighborhood must be inclusive or exclusive");

  c.alpha = file.get_double("evo", "alpha", 0.01);
  c.sigma_r2 = file.get_double("evo", "sigma_r2", 1.5);
  if (file.has("evo", "sigma_m2"))
    c.sigma_m2 = file.get_double_list("evo", "sigma_m2");
  if (file.has("evo", "degrees"))
    c.degrees = file.get_int_list("evo", "degrees");
  if (file.has("evo", "nodes")) c.evo_nodes = file.get_int_list("evo", "nodes");
  c.step_limit = file.get_int("evo", "step_limit", 10000000);
  if (file.has("evo", "rules")) {
    c.rules.clear();
    for (const std::string& r :
         split_names(file.get_string("evo", "rules"))) {
      if (r == "im")
        c.rules.push_back(evo::UpdateRule::im);
      else if (r == "bd")
        c.rules.push_back(evo::UpdateRule::bd);
      else if (r == "db")
        c.rules.push_back(evo::UpdateRule::db);
      else
        throw ConfigError("unknown update rule '" + r + "'");
    }
  }
  const std::string norm =
      file.get_string("evo", "normalization", "sweep_max");
  if (norm == "sweep_max")
    c.normalization = ExperimentConfig::Normalization::sweep_max;
  else if (norm == "point_max")
    c.normalization = ExperimentConfig::Normalization::point_max;
  else if (norm == "none")
    c.normalization = ExperimentConfig::Normalization::none;
  else
    throw ConfigError("normalization must be sweep_max, point_max or none");

  c.init_sm_fraction = file.get_double("ess", "init_sm_fraction", 0.95);
  c.p_r0 = file.get_double("ess", "p_r0", 0.1);
  c.snapshot_every = file.get_int("ess", "snapshot_every", 2000);
  c.snapshot_run = file.get_int("ess", "snapshot_run", 0);
  c.replicator_steps = file.get_int("ess", "replicator_steps", 30000);
  c.replicator_dt = file.get_double("ess", "replicator_dt", 1e-3);

  if (file.has("theory", "seed"))
    c.theory.seed = file.get_u64("theory", "seed");
  c.theory.draws = file.get_int("theory", "draws", 1000);
  c.theory.topologies =
      static_cast<int>(file.get_int("theory", "topologies", 100));
  c.theory.max_nodes = static_cast<int>(file.get_int("theory", "max_nodes", 30));
  c.theory.n_min = static_cast<int>(file.get_int("theory", "n_min", 3));
  c.theory.n_max = static_cast<int>(file.get_int("theory", "n_max", 12));
  c.theory.xi2_offset =
      static_cast<int>(file.get_int("theory", "xi2_offset", 0));
  if (c.theory.n_min < 3)
    throw ConfigError("theory n_min < 3 rejected (pair approximation bound)");

  // scenario default run counts
  if (c.runs == 0) {
    switch (c.scenario) {
      case Scenario::msd_compare: c.runs = 500; break;
      case Scenario::diffusion_sweep: c.runs = 10000; break;
      case Scenario::ess_grid: c.runs = 200; break;
      case Scenario::theory_check: c.runs = 0; break;
    }
  }

  if (c.algorithms.empty())
    c.algorithms = {"uniform",
                    "max_degree",
                    "laplacian",
                    "rel_degree",
                    "rel_degree_var",
                    "metropolis",
                    "hastings",
                    "egt_im:rel_degree_var",
                    "egt_bd:rel_degree_var",
                    "egt_db:rel_degree_var",
                    "error_aware_pow",
                    "error_aware_exp"};
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(cfg::ConfigFile::parse_file(path));
}

// --- policies ----------------------------------------------------------------

std::unique_ptr<CombinerPolicy> make_policy(
    const std::string& name, const Topology& topo,
    std::span<const NodeProfile> profiles, const ExperimentConfig& config) {
  if (name == "error_aware_pow")
    return std::make_unique<ErrorAwarePolicy>(
        topo, egt::ErrorFitnessForm::power, config.lambda_pow, config.nu,
        config.beta_floor);
  if (name == "error_aware_exp")
    return std::make_unique<ErrorAwarePolicy>(
        topo, egt::ErrorFitnessForm::exponential, config.lambda_exp, config.nu,
        config.beta_floor);

  const auto colon = name.find(':');
  if (name.rfind("egt_", 0) == 0 && colon != std::string::npos) {
    const std::string mode = name.substr(0, colon);
    const egt::FitnessRule frule =
        egt::fitness_rule_from_name(name.substr(colon + 1));
    std::vector<WeightRow> rows;
    rows.reserve(topo.node_count());
    for (int i = 0; i < topo.node_count(); ++i) {
      if (mode == "egt_bd") {
        std::vector<double> global(topo.node_count());
        for (int j = 0; j < topo.node_count(); ++j)
          global[j] = egt::fitness_table2(frule, topo, profiles, i, j);
        rows.push_back(egt::bd_weights(global, topo, i));
        continue;
      }
      std::vector<int> nodes{i};
      const auto nb = topo.neighbors(i);
      nodes.insert(nodes.end(), nb.begin(), nb.end());
      std::vector<double> fitness;
      fitness.reserve(nodes.size());
      for (const int j : nodes)
        fitness.push_back(egt::fitness_table2(frule, topo, profiles, i, j));
      if (mode == "egt_im")
        rows.push_back(egt::im_weights(std::move(nodes), fitness));
      else if (mode == "egt_db")
        rows.push_back(egt::db_weights(std::move(nodes), fitness, topo, i));
      else
        throw ConfigError("unknown EGT combiner '" + name + "'");
    }
    return std::make_unique<StaticPolicy>(
        name, CombinerMatrix::from_rows(topo, std::move(rows)));
  }

  const rules::StaticRule rule = rules::static_rule_from_name(name);
  return std::make_unique<StaticPolicy>(
      name, CombinerMatrix::build(rule, topo, profiles, config.neighborhood));
}

// --- mean-square experiment ----------------------------------------------------

metrics::RunCurve simulate_run(const Topology& topo,
                               std::span<const NodeProfile> profiles,
                               const std::string& algorithm,
                               const ExperimentConfig& config,
                               std::int64_t run_index) {
  const int n = topo.node_count();
  const long long horizon = config.horizon;
  const int window = config.steady_window;

  std::unique_ptr<CombinerPolicy> policy =
      make_policy(algorithm, topo, profiles, config);
  if (config.random_selection)
    policy = std::make_unique<RandomSelectionPolicy>(
        std::move(policy),
        mix_seed(config.seed, static_cast<std::uint64_t>(run_index), 0x57ee1));

  std::vector<Rng> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i)
    streams.emplace_back(mix_seed(config.seed,
                                  static_cast<std::uint64_t>(run_index),
                                  static_cast<std::uint64_t>(i), 0xDA7A));

  const std::vector<double> w0 = make_true_parameter(config.m);
  NetworkState state = NetworkState::zero(n, config.m);

  metrics::RunCurve curve;
  curve.net_msd.assign(horizon, 0.0);
  curve.net_emse.assign(horizon, 0.0);
  curve.node_steady_msd.assign(n, 0.0);
  curve.node_steady_emse.assign(n, 0.0);

  std::vector<DataSample> samples(n);
  for (long long t = 0; t < horizon; ++t) {
    for (int i = 0; i < n; ++i) samples[i] = sample(profiles[i], w0, streams[i]);

    const bool in_window = t >= horizon - window;
    double net_msd = 0.0, net_emse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double m_i = metrics::msd(state.estimates[i], w0);
      const double e_i =
          metrics::emse(state.estimates[i], w0, samples[i].regressor);
      net_msd += m_i;
      net_emse += e_i;
      if (in_window) {
        curve.node_steady_msd[i] += m_i;
        curve.node_steady_emse[i] += e_i;
      }
    }
    curve.net_msd[t] = net_msd / n;
    curve.net_emse[t] = net_emse / n;

    network_step(state, topo, profiles, *policy, samples);
  }

  for (int i = 0; i < n; ++i) {
    curve.node_steady_msd[i] /= window;
    curve.node_steady_emse[i] /= window;
    curve.steady_net_msd += curve.node_steady_msd[i];
    curve.steady_net_emse += curve.node_steady_emse[i];
  }
  curve.steady_net_msd /= n;
  curve.steady_net_emse /= n;
  return curve;
}

AlgorithmOutcome run_algorithm(const Topology& topo,
                               std::span<const NodeProfile> profiles,
                               const std::string& algorithm,
                               const ExperimentConfig& config) {
  std::vector<metrics::RunCurve> curves(config.runs);
  parallel_for(config.runs, config.threads, [&](std::int64_t r) {
    curves[r] = simulate_run(topo, profiles, algorithm, config, r);
  });
  AlgorithmOutcome out;
  out.name = algorithm;
  out.aggregate = metrics::aggregate(curves, config.steady_window);
  out.run_steady_emse.reserve(curves.size());
  out.run_steady_msd.reserve(curves.size());
  for (const auto& c : curves) {
    out.run_steady_emse.push_back(c.steady_net_emse);
    out.run_steady_msd.push_back(c.steady_net_msd);
  }
  return out;
}

ScenarioResult run_msd_compare(const ExperimentConfig& config,
                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Topology topo = build_topology(config.topology);
  const auto profiles = config.make_profiles(topo.node_count());

  // recorded so the substitute random topology is reproducible
  topo.save_edge_list(out_dir / "topology.txt");

  std::vector<AlgorithmOutcome> outcomes;
  outcomes.reserve(config.algorithms.size());
  for (const std::string& alg : config.algorithms)
    outcomes.push_back(run_algorithm(topo, profiles, alg, config));

  {
    auto csv = open_csv(out_dir / "transient.csv", config);
    csv << "t";
    for (const auto& o : outcomes)
      csv << "," << o.name << "_emse," << o.name << "_emse_db," << o.name
          << "_msd," << o.name << "_msd_db";
    csv << "\n";
    for (long long t = 0; t < config.horizon; ++t) {
      csv << t;
      for (const auto& o : outcomes) {
        const double e = o.aggregate.net_emse[t];
        const double m = o.aggregate.net_msd[t];
        csv << "," << fmt(e) << "," << fmt(metrics::to_db(e)) << "," << fmt(m)
            << "," << fmt(metrics::to_db(m));
      }
      csv << "\n";
    }
  }

  {
    auto csv = open_csv(out_dir / "steady.csv", config);
    csv << "node";
    for (const auto& o : outcomes)
      csv << "," << o.name << "_emse," << o.name << "_emse_db," << o.name
          << "_msd," << o.name << "_msd_db";
    csv << "\n";
    for (int i = 0; i < topo.node_count(); ++i) {
      csv << i;
      for (const auto& o : outcomes) {
        const double e = o.aggregate.node_steady_emse[i];
        const double m = o.aggregate.node_steady_msd[i];
        csv << "," << fmt(e) << "," << fmt(metrics::to_db(e)) << "," << fmt(m)
            << "," << fmt(metrics::to_db(m));
      }
      csv << "\n";
    }
  }

  {
    auto csv = open_csv(out_dir / "runs.csv", config);
    csv << "run";
    for (const auto& o : outcomes)
      csv << "," << o.name << "_steady_emse," << o.name << "_steady_msd";
    csv << "\n";
    for (long long r = 0; r < config.runs; ++r) {
      csv << r;
      for (const auto& o : outcomes)
        csv << "," << fmt(o.run_steady_emse[r]) << ","
            << fmt(o.run_steady_msd[r]);
      csv << "\n";
    }
  }

  std::ostringstream summary;
  {
    auto csv = open_csv(out_dir / "summary.csv", config);
    csv << "algorithm,steady_net_emse,steady_net_emse_stderr,steady_net_msd,"
           "steady_net_msd_stderr,msd_drop_db,final_msd_slope_db\n";
    for (const auto& o : outcomes) {
      const double drop = metrics::to_db(o.aggregate.net_msd[0]) -
                          metrics::to_db(o.aggregate.steady_net_msd.mean);
      csv << o.name << "," << fmt(o.aggregate.steady_net_emse.mean) << ","
          << fmt(o.aggregate.steady_net_emse.stderr_) << ","
          << fmt(o.aggregate.steady_net_msd.mean) << ","
          << fmt(o.aggregate.steady_net_msd.stderr_) << "," << fmt(drop) << ","
          << fmt(o.aggregate.final_msd_slope_db) << "\n";
      summary << o.name << ": steady EMSE " << fmt(o.aggregate.steady_net_emse.mean)
              << " (" << fmt(metrics::to_db(o.aggregate.steady_net_emse.mean))
              << " dB), MSD drop " << fmt(drop) << " dB\n";
    }
  }
  return {0, summary.str()};
}

// --- diffusion sweep ----------------------------------------------------------

std::vector<DiffusionPoint> diffusion_sweep_points(
    const ExperimentConfig& config) {
  std::vector<double> zeta = config.zeta;
  if (zeta.empty()) zeta.assign(config.m, 2.0);
  double trace = 0.0, znorm2 = 0.0;
  for (const double z : zeta) {
    trace += z;
    znorm2 += z * z;
  }

  std::vector<int> node_counts = config.evo_nodes;
  if (node_counts.size() == 1 && config.degrees.size() > 1)
    node_counts.assign(config.degrees.size(), node_counts[0]);
  if (node_counts.size() != config.degrees.size())
    throw ConfigError("evo nodes list must match degrees list");

  // one normalization factor across the sweep keeps the weak-selection scale
  // comparable between grid points
  double sweep_max = 0.0;
  for (const double sm2 : config.sigma_m2)
    sweep_max = std::max(
        sweep_max, evo::utility_from_pi(config.sigma_r2, sm2, config.mu, trace,
                                        znorm2)
                       .max_entry());

  std::vector<DiffusionPoint> points;
  for (std::size_t d = 0; d < config.degrees.size(); ++d) {
    const int n = config.degrees[d];
    const int big_n = node_counts[d];
    const Topology topo = circulant_of_degree(big_n, n);
    for (std::size_t s = 0; s < config.sigma_m2.size(); ++s) {
      const double sm2 = config.sigma_m2[s];
      const evo::UtilityMatrix2 raw = evo::utility_from_pi(
          config.sigma_r2, sm2, config.mu, trace, znorm2);
      double factor = 1.0;
      switch (config.normalization) {
        case ExperimentConfig::Normalization::sweep_max:
          factor = 1.0 / sweep_max;
          break;
        case ExperimentConfig::Normalization::point_max:
          factor = 1.0 / raw.max_entry();
          break;
        case ExperimentConfig::Normalization::none: factor = 1.0; break;
      }
      const evo::UtilityMatrix2 u = raw.scaled(factor);
      for (const evo::UpdateRule rule : config.rules) {
        DiffusionPoint p;
        p.degree = n;
        p.nodes = big_n;
        p.sigma_m2 = sm2;
        p.rule = rule;
        p.norm_factor = factor;
        evo::FixationOptions opts;
        opts.runs = config.runs;
        opts.step_limit = config.step_limit;
        opts.threads = config.threads;
        opts.rule = rule;
        opts.seed = mix_seed(config.seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(s),
                             static_cast<std::uint64_t>(rule));
        p.mc = evo::fixation_probability(topo, u, config.alpha,
                                         evo::Placement::evenly_spaced(), opts);
        p.theorem1 = evo::theorem1_closed_form(n, big_n, config.alpha, u);
        p.kolmogorov_h = evo::fixation_kolmogorov(n, big_n, config.alpha, u,
                                                  1.0 / (n + 1.0));
        points.push_back(std::move(p));
      }
    }
  }
  return points;
}

ScenarioResult run_diffusion_sweep(const ExperimentConfig& config,
                                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto points = diffusion_sweep_points(config);

  auto csv = open_csv(out_dir / "diffusion.csv", config);
  csv << "degree,nodes,sigma_m2,rule,norm_factor,runs,fixations,extinctions,"
         "censored,estimate,stderr,mean_events,theorem1,theorem1_in_range,"
         "kolmogorov_h\n";
  std::ostringstream summary;
  for (const auto& p : points) {
    csv << p.degree << "," << p.nodes << "," << fmt(p.sigma_m2) << ","
        << evo::to_string(p.rule) << "," << fmt(p.norm_factor) << ","
        << p.mc.runs << "," << p.mc.fixations << "," << p.mc.extinctions << ","
        << p.mc.censored << "," << fmt(p.mc.estimate) << ","
        << fmt(p.mc.stderr_) << "," << fmt(p.mc.mean_events) << ","
        << fmt(p.theorem1.value) << "," << (p.theorem1.in_unit_interval ? 1 : 0)
        << "," << fmt(p.kolmogorov_h) << "\n";
    summary << "n=" << p.degree << " sigma_m2=" << fmt(p.sigma_m2) << " rule="
            << evo::to_string(p.rule) << ": mc=" << fmt(p.mc.estimate)
            << " +- " << fmt(p.mc.stderr_) << ", theory="
            << fmt(p.theorem1.value) << ", censored=" << p.mc.censored << "\n";
  }
  return {0, summary.str()};
}

// --- ESS grid -------------------------------------------------------------------

ScenarioResult run_ess_grid(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (config.topology.kind != TopologySpec::Kind::grid_torus)
    throw ConfigError("ess_grid requires a grid_torus topology");
  const Topology topo = build_topology(config.topology);
  const int n_nodes = topo.node_count();
  const int degree = topo.degree(0);

  std::vector<double> zeta = config.zeta;
  if (zeta.empty()) zeta.assign(config.m, 2.0);
  double trace = 0.0, znorm2 = 0.0;
  for (const double z : zeta) {
    trace += z;
    znorm2 += z * z;
  }
  const double sm2 = config.sigma_m2.front();
  const evo::UtilityMatrix2 raw =
      evo::utility_from_pi(config.sigma_r2, sm2, config.mu, trace, znorm2);
  const double factor =
      config.normalization == ExperimentConfig::Normalization::none
          ? 1.0
          : 1.0 / raw.max_entry();
  const evo::UtilityMatrix2 u = raw.scaled(factor);

  enum : std::uint8_t { kSrExtinct, kSmExtinct, kCensored };
  std::vector<std::uint8_t> outcome(config.runs);
  std::vector<std::int64_t> steps(config.runs);
  // only the worker owning snapshot_run appends here
  std::vector<std::pair<std::int64_t, std::vector<std::uint8_t>>> snapshots;

  const evo::Placement placement =
      evo::Placement::random_fraction_of(config.init_sm_fraction);

  parallel_for(config.runs, config.threads, [&](std::int64_t run) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(run), 0xE55));
    evo::EvoState state(topo,
                        evo::make_initial_strategies(topo, placement, &rng));
    const bool record = run == config.snapshot_run;
    std::int64_t ev = 0;
    if (record)
      snapshots.emplace_back(0, std::vector<std::uint8_t>(
                                    state.strategies().begin(),
                                    state.strategies().end()));
    while (!state.absorbed() && ev < config.step_limit) {
      evo::im_strategy_step(state, u, config.alpha, rng);
      ++ev;
      if (record && ev % config.snapshot_every == 0)
        snapshots.emplace_back(ev, std::vector<std::uint8_t>(
                                       state.strategies().begin(),
                                       state.strategies().end()));
    }
    if (record && (snapshots.empty() || snapshots.back().first != ev))
      snapshots.emplace_back(ev, std::vector<std::uint8_t>(
                                     state.strategies().begin(),
                                     state.strategies().end()));
    steps[run] = ev;
    outcome[run] = !state.absorbed()          ? kCensored
                   : state.m_count() == n_nodes ? kSrExtinct
                                                : kSmExtinct;
  });

  {
    auto csv = open_csv(out_dir / "extinction.csv", config);
    csv << "run,outcome,steps\n";
    for (long long r = 0; r < config.runs; ++r) {
      const char* label = outcome[r] == kSrExtinct   ? "sr_extinct"
                          : outcome[r] == kSmExtinct ? "sm_extinct"
                                                     : "censored";
      csv << r << "," << label << "," << steps[r] << "\n";
    }
  }

  {
    std::sort(snapshots.begin(), snapshots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto csv = open_csv(out_dir / "snapshots.csv", config);
    csv << "epoch,node,row,col,strategy\n";
    for (const auto& [epoch, field] : snapshots)
      for (int i = 0; i < n_nodes; ++i)
        csv << epoch << "," << i << "," << i / config.topology.cols << ","
            << i % config.topology.cols << "," << int(field[i]) << "\n";
  }

  std::ostringstream summary;
  {
    auto csv = open_csv(out_dir / "replicator.csv", config);
    csv << "rule,t,p_r,p_m\n";
    for (const evo::UpdateRule rule :
         {evo::UpdateRule::im, evo::UpdateRule::bd, evo::UpdateRule::db}) {
      const auto verdict = evo::ess_regular(u, degree, rule);
      const auto traj = evo::replicator_trajectory(
          u, verdict.u_prime, config.p_r0, config.replicator_steps,
          config.replicator_dt,
          std::max<long>(1, config.replicator_steps / 1000));
      for (const auto& pt : traj)
        csv << evo::to_string(rule) << "," << fmt(pt.t) << "," << fmt(pt.p_r)
            << "," << fmt(pt.p_m) << "\n";
      summary << "replicator " << evo::to_string(rule) << ": u'="
              << fmt(verdict.u_prime) << " final p_r=" << fmt(traj.back().p_r)
              << "\n";
    }
  }

  long long extinct = 0;
  for (long long r = 0; r < config.runs; ++r)
    if (outcome[r] == kSrExtinct) ++extinct;
  summary << "S_r extinct in " << extinct << "/" << config.runs << " runs\n";
  return {0, summary.str()};
}

// --- theory check ----------------------------------------------------------------

ScenarioResult run_theory_check(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const theory::TheoryReport report = theory::theory_check(config.theory);

  auto csv = open_csv(out_dir / "theory_report.csv", config);
  csv << "check,max_deviation,tolerance,pass\n";
  std::ostringstream summary;
  for (const auto& c : report.checks) {
    csv << c.name << "," << fmt(c.max_deviation) << "," << fmt(c.tolerance)
        << "," << (c.pass ? 1 : 0) << "\n";
    summary << (c.pass ? "PASS " : "FAIL ") << c.name
            << " (max deviation " << fmt(c.max_deviation) << ")\n";
  }
  summary << "identity block: " << fmt(report.identity_seconds) << " s\n";
  return {report.all_pass() ? 0 : 2, summary.str()};
}

ScenarioResult run_scenario(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir) {
  switch (config.scenario) {
    case Scenario::msd_compare: return run_msd_compare(config, out_dir);
    case Scenario::diffusion_sweep:
      return run_diffusion_sweep(config, out_dir);
    case Scenario::ess_grid: return run_ess_grid(config, out_dir);
    case Scenario::theory_check: return run_theory_check(config, out_dir);
  }
  throw ConfigError("unhandled scenario");
}

}  // namespace adaptnet::experiments
