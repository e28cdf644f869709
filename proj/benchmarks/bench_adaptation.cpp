#include <benchmark/benchmark.h>

#include "adaptnet/adaptation.hpp"
#include "adaptnet/combiners.hpp"
#include "adaptnet/topology.hpp"

using namespace adaptnet;

namespace {

std::vector<NodeProfile> bench_profiles(int n) {
  std::vector<NodeProfile> p(n);
  for (int i = 0; i < n; ++i) {
    p[i].noise_variance = 0.2 + 1.3 * i / std::max(1, n - 1);
    p[i].step_size = 0.01;
    p[i].regressor_spectrum = {2, 2, 2, 2, 2};
  }
  return p;
}

void BM_network_step(benchmark::State& state) {
  const auto geo = random_geometric(static_cast<int>(state.range(0)), 0.4, 7);
  const Topology& topo = geo.topology;
  const auto profiles = bench_profiles(topo.node_count());
  const auto w0 = make_true_parameter(5);
  StaticPolicy policy(
      "uniform",
      CombinerMatrix::build(rules::StaticRule::uniform, topo, profiles));
  NetworkState net = NetworkState::zero(topo.node_count(), 5);
  std::vector<Rng> streams;
  for (int i = 0; i < topo.node_count(); ++i) streams.emplace_back(mix_seed(1, 0, i));
  for (auto _ : state) {
    network_step(net, topo, profiles, policy, w0, streams);
    benchmark::DoNotOptimize(net.estimates[0][0]);
  }
  state.SetItemsProcessed(state.iterations() * topo.node_count());
}

void BM_error_aware_step(benchmark::State& state) {
  const auto geo = random_geometric(static_cast<int>(state.range(0)), 0.4, 7);
  const Topology& topo = geo.topology;
  const auto profiles = bench_profiles(topo.node_count());
  const auto w0 = make_true_parameter(5);
  ErrorAwarePolicy policy(topo, egt::ErrorFitnessForm::power, 2.0, 0.05);
  NetworkState net = NetworkState::zero(topo.node_count(), 5);
  std::vector<Rng> streams;
  for (int i = 0; i < topo.node_count(); ++i) streams.emplace_back(mix_seed(2, 0, i));
  for (auto _ : state) {
    network_step(net, topo, profiles, policy, w0, streams);
    benchmark::DoNotOptimize(net.estimates[0][0]);
  }
  state.SetItemsProcessed(state.iterations() * topo.node_count());
}

}  // namespace

BENCHMARK(BM_network_step)->Arg(20)->Arg(100);
BENCHMARK(BM_error_aware_step)->Arg(20)->Arg(100);
