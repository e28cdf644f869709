#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "adaptnet/combiners.hpp"
#include "adaptnet/signal_model.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet::egt {

// f = (1 - alpha) * B + alpha * U; must be positive before use as a
// selection weight.
struct Fitness {
  double baseline = 1.0;
  double selection_intensity = 0.0;  // alpha in [0, 1]
  double utility = 0.0;

  double value() const {
    return (1.0 - selection_intensity) * baseline +
           selection_intensity * utility;
  }
};

enum class FitnessRule {
  uniform,
  max_degree,
  laplacian,
  rel_degree,
  rel_degree_var,
};

FitnessRule fitness_rule_from_name(std::string_view name);

// Fitness of node j as seen from updating node i. Metropolis/Hastings are
// utility-matrix based and rejected here; see the *_row_via_utility routines.
double fitness_table2(FitnessRule rule, const Topology& topo,
                      std::span<const NodeProfile> profiles, int i, int j);

// IM: weight row f_j / sum_{k in N_i} f_k over the closed neighborhood.
// fitness[k] aligns with nodes[k]; all fitnesses must be positive.
WeightRow im_weights(std::vector<int> nodes, std::span<const double> fitness);

// BD: off-self weight (f_j / sum_{k in N} f_k) / n_j, self completes to 1.
// Needs fitness for every node in the network.
WeightRow bd_weights(std::span<const double> global_fitness,
                     const Topology& topo, int i);

// DB: off-self weight (1/n_i) * f_j / sum_{k in N_i} f_k, self completes
// to 1. fitness aligned with the closed neighborhood (self first).
WeightRow db_weights(std::vector<int> nodes, std::span<const double> fitness,
                     const Topology& topo, int i);

// Running MSE estimate: rho = |d - u . w_prev|^2, beta <- (1-nu) beta + nu rho
struct ErrorTracker {
  double beta = 1.0;
  double forgetting = 0.05;  // nu in (0, 1]

  void update(std::span<const double> w_prev, const DataSample& sample);
};

double instantaneous_error(std::span<const double> w_prev,
                           const DataSample& sample);

enum class ErrorFitnessForm { power, exponential };

// Power: f = beta^-lambda (beta <= beta_floor is an error when the floor is
// 0). Exponential: f = exp(-lambda beta).
std::vector<double> error_aware_fitness(std::span<const double> betas,
                                        ErrorFitnessForm form, double lambda,
                                        double beta_floor = 0.0);

// Wright-Fisher share update p_i <- p_i f_i / phi with f_i = sum_j p_j u_ij.
std::vector<double> wright_fisher_step(
    std::span<const double> shares,
    const std::vector<std::vector<double>>& utility);

// Verification route for the Metropolis/Hastings correspondence: assemble the
// pairwise utility-matrix entries directly into a weight row (strong
// selection, fitness = utility). Not a runtime combiner.
WeightRow metropolis_row_via_utility(
    const Topology& topo, int i,
    rules::NeighborhoodSize mode = rules::NeighborhoodSize::inclusive);
WeightRow hastings_row_via_utility(
    const Topology& topo, std::span<const NodeProfile> profiles, int i,
    rules::NeighborhoodSize mode = rules::NeighborhoodSize::inclusive);

}  // namespace adaptnet::egt
