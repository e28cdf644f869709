#include <benchmark/benchmark.h>

#include "adaptnet/evo_game.hpp"
#include "adaptnet/topology.hpp"

using namespace adaptnet;

namespace {

void BM_im_strategy_step(benchmark::State& state) {
  const Topology topo =
      circulant_of_degree(static_cast<int>(state.range(0)), 4);
  const auto init =
      evo::make_initial_strategies(topo, evo::Placement::evenly_spaced());
  const evo::UtilityMatrix2 u{0.37, 0.75, 0.59, 1.0, true};
  Rng rng(33);
  evo::EvoState st(topo, init);
  std::int64_t events = 0;
  for (auto _ : state) {
    evo::im_strategy_step(st, u, 0.01, rng);
    if (st.absorbed()) st = evo::EvoState(topo, init);
    ++events;
  }
  state.SetItemsProcessed(events);
}

void BM_fixation_run(benchmark::State& state) {
  const Topology topo = circulant_of_degree(100, 4);
  const auto init =
      evo::make_initial_strategies(topo, evo::Placement::evenly_spaced());
  const evo::UtilityMatrix2 u{0.37, 0.75, 0.59, 1.0, true};
  std::uint64_t run = 0;
  for (auto _ : state) {
    Rng rng(mix_seed(5, run++));
    evo::EvoState st(topo, init);
    std::int64_t ev = 0;
    while (!st.absorbed() && ev < 10000000) {
      evo::im_strategy_step(st, u, 0.01, rng);
      ++ev;
    }
    benchmark::DoNotOptimize(st.m_count());
  }
}

void BM_theorem1(benchmark::State& state) {
  const evo::UtilityMatrix2 u{0.37, 0.75, 0.59, 1.0, true};
  int n = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evo::theorem1_closed_form(3 + (n++ % 10), 100, 0.01, u).value);
  }
}

}  // namespace

BENCHMARK(BM_im_strategy_step)->Arg(50)->Arg(100)->Arg(500);
BENCHMARK(BM_fixation_run);
BENCHMARK(BM_theorem1);
