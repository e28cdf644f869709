#include "adaptnet/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "adaptnet/errors.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet {

namespace {

bool connected(int n, const std::vector<std::int32_t>& offsets,
               const std::vector<int>& adjacency) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (std::int32_t k = offsets[v]; k < offsets[v + 1]; ++k) {
      const int w = adjacency[k];
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

}  // namespace

Topology Topology::from_edges(int node_count,
                              std::vector<std::pair<int, int>> edges) {
  if (node_count < 1) throw TopologyError("topology needs at least one node");
  std::set<std::pair<int, int>> unique;
  for (auto& [a, b] : edges) {
    if (a == b) throw TopologyError("self-loop on node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= node_count || b >= node_count)
      throw TopologyError("edge endpoint out of range");
    if (a > b) std::swap(a, b);
    if (!unique.insert({a, b}).second)
      throw TopologyError("duplicate edge " + std::to_string(a) + "-" +
                          std::to_string(b));
  }

  Topology t;
  t.node_count_ = node_count;
  t.edge_count_ = unique.size();
  std::vector<int> deg(node_count, 0);
  for (const auto& [a, b] : unique) {
    ++deg[a];
    ++deg[b];
  }
  t.offsets_.assign(node_count + 1, 0);
  for (int i = 0; i < node_count; ++i) t.offsets_[i + 1] = t.offsets_[i] + deg[i];
  t.adjacency_.resize(2 * unique.size());
  std::vector<std::int32_t> cursor(t.offsets_.begin(), t.offsets_.end() - 1);
  for (const auto& [a, b] : unique) {
    t.adjacency_[cursor[a]++] = b;
    t.adjacency_[cursor[b]++] = a;
  }
  for (int i = 0; i < node_count; ++i)
    std::sort(t.adjacency_.begin() + t.offsets_[i],
              t.adjacency_.begin() + t.offsets_[i + 1]);

  if (!connected(node_count, t.offsets_, t.adjacency_))
    throw TopologyError("graph is not connected");

  t.n_max_ = 0;
  for (int i = 0; i < node_count; ++i)
    t.n_max_ = std::max(t.n_max_, t.neighborhood_size(i));
  return t;
}

bool Topology::is_regular() const {
  for (int i = 1; i < node_count_; ++i)
    if (degree(i) != degree(0)) return false;
  return true;
}

bool Topology::has_edge(int i, int j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<int, int>> Topology::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int i = 0; i < node_count_; ++i)
    for (const int j : neighbors(i))
      if (i < j) out.emplace_back(i, j);
  return out;
}

Topology Topology::load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open edge list: " + path.string());
  int n = 0;
  if (!(in >> n)) throw TopologyError("edge list missing node count line");
  std::vector<std::pair<int, int>> edges;
  int a, b;
  while (in >> a >> b) {
    if (a >= b)
      throw TopologyError("edge list rows must satisfy i < j, got " +
                          std::to_string(a) + " " + std::to_string(b));
    edges.emplace_back(a, b);
  }
  return from_edges(n, std::move(edges));
}

void Topology::save_edge_list(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw TopologyError("cannot write edge list: " + path.string());
  out << node_count_ << "\n";
  for (const auto& [a, b] : edges()) out << a << " " << b << "\n";
}

Topology regular_circulant(int node_count, std::vector<int> offsets) {
  if (node_count < 3) throw TopologyError("circulant requires N >= 3");
  if (offsets.empty()) throw TopologyError("circulant requires offsets");
  std::sort(offsets.begin(), offsets.end());
  if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
    throw TopologyError("duplicate circulant offsets");
  for (const int k : offsets) {
    if (k < 1) throw TopologyError("circulant offsets must be positive");
    const bool half = (node_count % 2 == 0) && (k == node_count / 2);
    if (2 * k > node_count || (2 * k == node_count && !half))
      throw TopologyError("circulant offset " + std::to_string(k) +
                          " exceeds N/2");
  }
  // the N/2 offset generates each of its edges from both endpoints
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < node_count; ++i)
    for (const int k : offsets) {
      const int j = (i + k) % node_count;
      edges.insert({std::min(i, j), std::max(i, j)});
    }
  return Topology::from_edges(
      node_count, std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
}

Topology circulant_of_degree(int node_count, int degree) {
  if (degree < 2) throw TopologyError("circulant degree must be >= 2");
  std::vector<int> offsets;
  for (int k = 1; k <= degree / 2; ++k) offsets.push_back(k);
  if (degree % 2 == 1) {
    if (node_count % 2 != 0)
      throw TopologyError("odd circulant degree requires even N");
    offsets.push_back(node_count / 2);
  }
  return regular_circulant(node_count, std::move(offsets));
}

Topology grid_torus(int rows, int cols) {
  if (rows < 3 || cols < 3) throw TopologyError("torus requires rows, cols >= 3");
  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int a = id(r, c);
      const int right = id(r, (c + 1) % cols);
      const int down = id((r + 1) % rows, c);
      edges.emplace_back(std::min(a, right), std::max(a, right));
      edges.emplace_back(std::min(a, down), std::max(a, down));
    }
  return Topology::from_edges(rows * cols, std::move(edges));
}

GeometricResult random_geometric(int node_count, double radius,
                                 std::uint64_t seed, int retry_budget) {
  if (node_count < 1) throw TopologyError("geometric graph requires N >= 1");
  if (!(radius > 0.0) || radius > 1.4142135623730951 + 1e-12)
    throw TopologyError("geometric radius must be in (0, sqrt(2)]");
  const double r2 = radius * radius;
  Rng rng(mix_seed(seed, 0x9e0));
  for (int attempt = 1; attempt <= retry_budget; ++attempt) {
    std::vector<std::pair<double, double>> pos(node_count);
    for (auto& p : pos) {
      p.first = rng.uniform();
      p.second = rng.uniform();
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < node_count; ++i)
      for (int j = i + 1; j < node_count; ++j) {
        const double dx = pos[i].first - pos[j].first;
        const double dy = pos[i].second - pos[j].second;
        if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
      }
    try {
      GeometricResult out{Topology::from_edges(node_count, std::move(edges)),
                          std::move(pos), attempt};
      return out;
    } catch (const TopologyError&) {
      // disconnected draw, resample
    }
  }
  throw TopologyError("no connected geometric graph within " +
                      std::to_string(retry_budget) + " attempts (radius " +
                      std::to_string(radius) + ")");
}

}  // namespace adaptnet
