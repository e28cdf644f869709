#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptnet/signal_model.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet {

// Sparse combination weight row for one node: support is N_i (self included),
// weights nonnegative and summing to 1 within 1e-12.
struct WeightRow {
  std::vector<int> nodes;
  std::vector<double> weights;
};

inline constexpr double kRowSumTolerance = 1e-12;

// Throws CombinerError on negative weight, support outside N_i, or row sum
// off by more than the tolerance.
void validate_row(const WeightRow& row, const Topology& topo, int i);

namespace rules {

enum class StaticRule {
  uniform,
  max_degree,
  laplacian,
  rel_degree,
  rel_degree_var,
  metropolis,
  hastings,
};

StaticRule static_rule_from_name(std::string_view name);
std::string to_string(StaticRule rule);

// |N| convention for the Metropolis/Hastings denominators. The tables use the
// self-inclusive cardinality; exclusive is kept for sensitivity checks.
enum class NeighborhoodSize { inclusive, exclusive };

WeightRow uniform(const Topology& topo, int i);
WeightRow max_degree(const Topology& topo, int i);
WeightRow laplacian(const Topology& topo, int i);
WeightRow rel_degree(const Topology& topo, int i);
WeightRow rel_degree_var(const Topology& topo,
                         std::span<const NodeProfile> profiles, int i);
WeightRow metropolis(const Topology& topo, int i,
                     NeighborhoodSize mode = NeighborhoodSize::inclusive);
// As printed, sigma_j^2 sits in the numerator. Extreme variance spreads can
// push the self-weight negative; that raises CombinerError instead of
// clamping.
WeightRow hastings(const Topology& topo, std::span<const NodeProfile> profiles,
                   int i, NeighborhoodSize mode = NeighborhoodSize::inclusive);

WeightRow make_row(StaticRule rule, const Topology& topo,
                   std::span<const NodeProfile> profiles, int i,
                   NeighborhoodSize mode = NeighborhoodSize::inclusive);

}  // namespace rules

// All rows of one rule, validated on construction.
class CombinerMatrix {
 public:
  static CombinerMatrix build(rules::StaticRule rule, const Topology& topo,
                              std::span<const NodeProfile> profiles,
                              rules::NeighborhoodSize mode =
                                  rules::NeighborhoodSize::inclusive);
  static CombinerMatrix from_rows(const Topology& topo,
                                  std::vector<WeightRow> rows);

  const WeightRow& row(int i) const { return rows_[i]; }
  int node_count() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<WeightRow> rows_;
};

}  // namespace adaptnet
