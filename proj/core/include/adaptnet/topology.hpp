#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adaptnet {

// Immutable undirected connected graph. The neighborhood convention follows
// the combination-rule literature: N_i includes node i itself, so
// neighborhood_size(i) == degree(i) + 1 and sum_i (n_i - 1) == 2 * edges.
// Self-loops are never stored.
class Topology {
 public:
  // Validates: ids in range, no self-loops, no duplicate edges, connected.
  static Topology from_edges(int node_count,
                             std::vector<std::pair<int, int>> edges);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edge_count_; }

  // graph neighbors of i, sorted, excluding i
  std::span<const int> neighbors(int i) const {
    return {adjacency_.data() + offsets_[i],
            adjacency_.data() + offsets_[i + 1]};
  }

  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }

  // |N_i| with the self-inclusive convention
  int neighborhood_size(int i) const { return degree(i) + 1; }

  // max over nodes of |N_i|
  int n_max() const { return n_max_; }

  bool is_regular() const;
  bool has_edge(int i, int j) const;

  // edges as (i, j) with i < j, lexicographic
  std::vector<std::pair<int, int>> edges() const;

  // Edge-list text format: first line N, then one "i j" per line, 0-indexed,
  // i < j.
  static Topology load_edge_list(const std::filesystem::path& path);
  void save_edge_list(const std::filesystem::path& path) const;

 private:
  Topology() = default;

  int node_count_ = 0;
  std::size_t edge_count_ = 0;
  int n_max_ = 0;
  std::vector<std::int32_t> offsets_;
  std::vector<int> adjacency_;
};

// Circulant graph on N nodes: i ~ i +- k (mod N) for every offset k. Each
// offset below N/2 contributes 2 to the degree; the offset N/2 (even N only)
// contributes 1. Rejects N < 3, duplicate or out-of-range offsets, and
// disconnected results (gcd of offsets and N must be 1).
Topology regular_circulant(int node_count, std::vector<int> offsets);

// Circulant of exact degree n: offsets {1..n/2} for even n, {1..(n-1)/2, N/2}
// for odd n (requires even N).
Topology circulant_of_degree(int node_count, int degree);

// rows x cols torus with von Neumann wraparound neighborhoods; every node has
// degree exactly 4. Requires rows, cols >= 3.
Topology grid_torus(int rows, int cols);

struct GeometricResult {
  Topology topology;
  std::vector<std::pair<double, double>> positions;
  int attempts = 0;
};

// N points uniform in the unit square, edge iff Euclidean distance <= radius.
// Resamples until connected, up to retry_budget attempts. Deterministic for a
// fixed seed.
GeometricResult random_geometric(int node_count, double radius,
                                 std::uint64_t seed, int retry_budget = 1000);

}  // namespace adaptnet
