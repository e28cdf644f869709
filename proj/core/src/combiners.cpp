#include "adaptnet/combiners.hpp"

#include <algorithm>
#include <cmath>

#include "adaptnet/errors.hpp"

namespace adaptnet {

void validate_row(const WeightRow& row, const Topology& topo, int i) {
  if (row.nodes.size() != row.weights.size())
    throw CombinerError("weight row shape mismatch at node " +
                        std::to_string(i));
  double sum = 0.0;
  for (std::size_t k = 0; k < row.nodes.size(); ++k) {
    const int j = row.nodes[k];
    const double w = row.weights[k];
    if (w < 0.0)
      throw CombinerError("negative weight " + std::to_string(w) +
                          " at node " + std::to_string(i) + " for neighbor " +
                          std::to_string(j));
    if (j != i && !topo.has_edge(i, j))
      throw CombinerError("weight support outside N_" + std::to_string(i) +
                          ": node " + std::to_string(j));
    sum += w;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance)
    throw CombinerError("weight row of node " + std::to_string(i) +
                        " sums to " + std::to_string(sum));
}

namespace rules {

StaticRule static_rule_from_name(std::string_view name) {
  if (name == "uniform") return StaticRule::uniform;
  if (name == "max_degree") return StaticRule::max_degree;
  if (name == "laplacian") return StaticRule::laplacian;
  if (name == "rel_degree") return StaticRule::rel_degree;
  if (name == "rel_degree_var") return StaticRule::rel_degree_var;
  if (name == "metropolis") return StaticRule::metropolis;
  if (name == "hastings") return StaticRule::hastings;
  throw std::invalid_argument("unknown combination rule: " +
                              std::string(name));
}

std::string to_string(StaticRule rule) {
  switch (rule) {
    case StaticRule::uniform: return "uniform";
    case StaticRule::max_degree: return "max_degree";
    case StaticRule::laplacian: return "laplacian";
    case StaticRule::rel_degree: return "rel_degree";
    case StaticRule::rel_degree_var: return "rel_degree_var";
    case StaticRule::metropolis: return "metropolis";
    case StaticRule::hastings: return "hastings";
  }
  return "?";
}

namespace {

// closed neighborhood with self first
std::vector<int> support(const Topology& topo, int i) {
  std::vector<int> nodes;
  nodes.reserve(topo.neighborhood_size(i));
  nodes.push_back(i);
  const auto nb = topo.neighbors(i);
  nodes.insert(nodes.end(), nb.begin(), nb.end());
  return nodes;
}

int nsize(const Topology& topo, int j, NeighborhoodSize mode) {
  return mode == NeighborhoodSize::inclusive ? topo.neighborhood_size(j)
                                             : topo.degree(j);
}

}  // namespace

WeightRow uniform(const Topology& topo, int i) {
  WeightRow row{support(topo, i), {}};
  row.weights.assign(row.nodes.size(), 1.0 / topo.neighborhood_size(i));
  return row;
}

WeightRow max_degree(const Topology& topo, int i) {
  const double n = topo.node_count();
  WeightRow row{support(topo, i), {}};
  row.weights.assign(row.nodes.size(), 1.0 / n);
  row.weights[0] = 1.0 - (topo.neighborhood_size(i) - 1) / n;
  return row;
}

WeightRow laplacian(const Topology& topo, int i) {
  const double nmax = topo.n_max();
  WeightRow row{support(topo, i), {}};
  row.weights.assign(row.nodes.size(), 1.0 / nmax);
  row.weights[0] = 1.0 - (topo.neighborhood_size(i) - 1) / nmax;
  return row;
}

WeightRow rel_degree(const Topology& topo, int i) {
  WeightRow row{support(topo, i), {}};
  double total = 0.0;
  for (const int j : row.nodes) total += topo.neighborhood_size(j);
  row.weights.reserve(row.nodes.size());
  for (const int j : row.nodes)
    row.weights.push_back(topo.neighborhood_size(j) / total);
  return row;
}

WeightRow rel_degree_var(const Topology& topo,
                         std::span<const NodeProfile> profiles, int i) {
  WeightRow row{support(topo, i), {}};
  double total = 0.0;
  for (const int j : row.nodes)
    total += topo.neighborhood_size(j) / profiles[j].noise_variance;
  row.weights.reserve(row.nodes.size());
  for (const int j : row.nodes)
    row.weights.push_back(topo.neighborhood_size(j) /
                          profiles[j].noise_variance / total);
  return row;
}

WeightRow metropolis(const Topology& topo, int i, NeighborhoodSize mode) {
  WeightRow row{support(topo, i), {}};
  row.weights.resize(row.nodes.size());
  double off = 0.0;
  for (std::size_t k = 1; k < row.nodes.size(); ++k) {
    const int j = row.nodes[k];
    row.weights[k] =
        1.0 / std::max(nsize(topo, i, mode), nsize(topo, j, mode));
    off += row.weights[k];
  }
  row.weights[0] = 1.0 - off;
  validate_row(row, topo, i);
  return row;
}

WeightRow hastings(const Topology& topo, std::span<const NodeProfile> profiles,
                   int i, NeighborhoodSize mode) {
  WeightRow row{support(topo, i), {}};
  row.weights.resize(row.nodes.size());
  const double si2 = profiles[i].noise_variance;
  double off = 0.0;
  for (std::size_t k = 1; k < row.nodes.size(); ++k) {
    const int j = row.nodes[k];
    const double sj2 = profiles[j].noise_variance;
    row.weights[k] =
        sj2 / std::max(nsize(topo, i, mode) * si2, nsize(topo, j, mode) * sj2);
    off += row.weights[k];
  }
  row.weights[0] = 1.0 - off;
  validate_row(row, topo, i);
  return row;
}

WeightRow make_row(StaticRule rule, const Topology& topo,
                   std::span<const NodeProfile> profiles, int i,
                   NeighborhoodSize mode) {
  switch (rule) {
    case StaticRule::uniform: return uniform(topo, i);
    case StaticRule::max_degree: return max_degree(topo, i);
    case StaticRule::laplacian: return laplacian(topo, i);
    case StaticRule::rel_degree: return rel_degree(topo, i);
    case StaticRule::rel_degree_var: return rel_degree_var(topo, profiles, i);
    case StaticRule::metropolis: return metropolis(topo, i, mode);
    case StaticRule::hastings: return hastings(topo, profiles, i, mode);
  }
  throw std::invalid_argument("unhandled rule");
}

}  // namespace rules

CombinerMatrix CombinerMatrix::build(rules::StaticRule rule,
                                     const Topology& topo,
                                     std::span<const NodeProfile> profiles,
                                     rules::NeighborhoodSize mode) {
  std::vector<WeightRow> rows;
  rows.reserve(topo.node_count());
  for (int i = 0; i < topo.node_count(); ++i)
    rows.push_back(rules::make_row(rule, topo, profiles, i, mode));
  return from_rows(topo, std::move(rows));
}

CombinerMatrix CombinerMatrix::from_rows(const Topology& topo,
                                         std::vector<WeightRow> rows) {
  if (static_cast<int>(rows.size()) != topo.node_count())
    throw CombinerError("combiner matrix needs one row per node");
  for (int i = 0; i < topo.node_count(); ++i) validate_row(rows[i], topo, i);
  CombinerMatrix m;
  m.rows_ = std::move(rows);
  return m;
}

}  // namespace adaptnet
