#include "adaptnet/egt_combiners.hpp"

#include <cmath>
#include <stdexcept>

#include "adaptnet/errors.hpp"

namespace adaptnet::egt {

FitnessRule fitness_rule_from_name(std::string_view name) {
  if (name == "uniform") return FitnessRule::uniform;
  if (name == "max_degree") return FitnessRule::max_degree;
  if (name == "laplacian") return FitnessRule::laplacian;
  if (name == "rel_degree") return FitnessRule::rel_degree;
  if (name == "rel_degree_var") return FitnessRule::rel_degree_var;
  throw std::invalid_argument("unknown fitness rule: " + std::string(name));
}

double fitness_table2(FitnessRule rule, const Topology& topo,
                      std::span<const NodeProfile> profiles, int i, int j) {
  switch (rule) {
    case FitnessRule::uniform:
      return 1.0;
    case FitnessRule::max_degree:
      return j == i ? topo.node_count() - topo.neighborhood_size(i) + 1.0
                    : 1.0;
    case FitnessRule::laplacian:
      return j == i ? topo.n_max() - topo.neighborhood_size(i) + 1.0 : 1.0;
    case FitnessRule::rel_degree:
      return topo.neighborhood_size(j);
    case FitnessRule::rel_degree_var:
      return topo.neighborhood_size(j) / profiles[j].noise_variance;
  }
  throw std::invalid_argument("unhandled fitness rule");
}

WeightRow im_weights(std::vector<int> nodes, std::span<const double> fitness) {
  if (nodes.size() != fitness.size() || nodes.empty())
    throw std::invalid_argument("im_weights: shape mismatch");
  double total = 0.0;
  for (const double f : fitness) {
    if (!(f > 0.0)) throw CombinerError("im_weights: nonpositive fitness");
    total += f;
  }
  WeightRow row{std::move(nodes), {}};
  row.weights.reserve(fitness.size());
  for (const double f : fitness) row.weights.push_back(f / total);
  return row;
}

WeightRow bd_weights(std::span<const double> global_fitness,
                     const Topology& topo, int i) {
  if (static_cast<int>(global_fitness.size()) != topo.node_count())
    throw std::invalid_argument("bd_weights: fitness for all nodes required");
  double total = 0.0;
  for (const double f : global_fitness) {
    if (!(f > 0.0)) throw CombinerError("bd_weights: nonpositive fitness");
    total += f;
  }
  WeightRow row;
  row.nodes.push_back(i);
  row.weights.push_back(0.0);
  double off = 0.0;
  for (const int j : topo.neighbors(i)) {
    const double w =
        global_fitness[j] / total / topo.neighborhood_size(j);
    row.nodes.push_back(j);
    row.weights.push_back(w);
    off += w;
  }
  if (off > 1.0)
    throw CombinerError("bd_weights: off-self mass exceeds 1 at node " +
                        std::to_string(i));
  row.weights[0] = 1.0 - off;
  return row;
}

WeightRow db_weights(std::vector<int> nodes, std::span<const double> fitness,
                     const Topology& topo, int i) {
  if (nodes.size() != fitness.size() || nodes.empty() || nodes[0] != i)
    throw std::invalid_argument("db_weights: closed neighborhood, self first");
  double total = 0.0;
  for (const double f : fitness) {
    if (!(f > 0.0)) throw CombinerError("db_weights: nonpositive fitness");
    total += f;
  }
  const double ni = topo.neighborhood_size(i);
  WeightRow row{std::move(nodes), {}};
  row.weights.resize(row.nodes.size());
  double off = 0.0;
  for (std::size_t k = 1; k < row.nodes.size(); ++k) {
    row.weights[k] = fitness[k] / total / ni;
    off += row.weights[k];
  }
  if (off > 1.0)
    throw CombinerError("db_weights: off-self mass exceeds 1 at node " +
                        std::to_string(i));
  row.weights[0] = 1.0 - off;
  return row;
}

double instantaneous_error(std::span<const double> w_prev,
                           const DataSample& sample) {
  const double e = sample.measurement - dot(sample.regressor, w_prev);
  return e * e;
}

void ErrorTracker::update(std::span<const double> w_prev,
                          const DataSample& sample) {
  if (!(forgetting > 0.0) || forgetting > 1.0)
    throw std::invalid_argument("forgetting factor must be in (0, 1]");
  beta = (1.0 - forgetting) * beta +
         forgetting * instantaneous_error(w_prev, sample);
}

std::vector<double> error_aware_fitness(std::span<const double> betas,
                                        ErrorFitnessForm form, double lambda,
                                        double beta_floor) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  std::vector<double> f;
  f.reserve(betas.size());
  for (double b : betas) {
    if (b < 0.0) throw std::invalid_argument("negative MSE estimate");
    if (form == ErrorFitnessForm::power) {
      b = std::max(b, beta_floor);
      if (!(b > 0.0))
        throw CombinerError(
            "power-form fitness undefined at beta = 0 (set a beta floor)");
      f.push_back(std::pow(b, -lambda));
    } else {
      f.push_back(std::exp(-lambda * b));
    }
  }
  return f;
}

std::vector<double> wright_fisher_step(
    std::span<const double> shares,
    const std::vector<std::vector<double>>& utility) {
  const std::size_t m = shares.size();
  if (utility.size() != m)
    throw std::invalid_argument("utility matrix shape mismatch");
  double phi = 0.0;
  std::vector<double> fit(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (utility[i].size() != m)
      throw std::invalid_argument("utility matrix shape mismatch");
    for (std::size_t j = 0; j < m; ++j) fit[i] += shares[j] * utility[i][j];
    phi += shares[i] * fit[i];
  }
  if (!(phi > 0.0))
    throw std::domain_error("average fitness must be positive");
  std::vector<double> next(m);
  for (std::size_t i = 0; i < m; ++i) next[i] = shares[i] * fit[i] / phi;
  return next;
}

namespace {

int nsize(const Topology& topo, int j, rules::NeighborhoodSize mode) {
  return mode == rules::NeighborhoodSize::inclusive
             ? topo.neighborhood_size(j)
             : topo.degree(j);
}

}  // namespace

WeightRow metropolis_row_via_utility(const Topology& topo, int i,
                                     rules::NeighborhoodSize mode) {
  // Off-diagonal utility entries are the pair weights; the diagonal entry
  // 1 - sum_k A_i(k) closes the row.
  WeightRow row;
  row.nodes.push_back(i);
  row.weights.push_back(0.0);
  double off = 0.0;
  for (const int j : topo.neighbors(i)) {
    const double u =
        1.0 / std::max(nsize(topo, i, mode), nsize(topo, j, mode));
    row.nodes.push_back(j);
    row.weights.push_back(u);
    off += u;
  }
  row.weights[0] = 1.0 - off;
  validate_row(row, topo, i);
  return row;
}

WeightRow hastings_row_via_utility(const Topology& topo,
                                   std::span<const NodeProfile> profiles,
                                   int i, rules::NeighborhoodSize mode) {
  WeightRow row;
  row.nodes.push_back(i);
  row.weights.push_back(0.0);
  const double si2 = profiles[i].noise_variance;
  double off = 0.0;
  for (const int j : topo.neighbors(i)) {
    const double sj2 = profiles[j].noise_variance;
    // Table's sigma^2_(i,j) pair subscript is read as sigma_j^2.
    const double u =
        sj2 / std::max(nsize(topo, i, mode) * si2, nsize(topo, j, mode) * sj2);
    row.nodes.push_back(j);
    row.weights.push_back(u);
    off += u;
  }
  row.weights[0] = 1.0 - off;
  validate_row(row, topo, i);
  return row;
}

}  // namespace adaptnet::egt
