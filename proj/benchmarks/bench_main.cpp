#include <vector>

#include <benchmark/benchmark.h>

#include <mfgnet/epidemic.hpp>
#include <mfgnet/grid.hpp>
#include <mfgnet/mfg.hpp>
#include <mfgnet/scenario.hpp>
#include <mfgnet/stationary.hpp>

using namespace mfgnet;

namespace {

CostWeights crowd_averse() {
  CostWeights w = CostWeights::with_slopes({1.0, 1.0, 1.0});
  w.Gamma[0][2] = 0.5;
  w.Gamma[1][2] = 0.5;
  return w;
}

void BM_SolveItvp(benchmark::State& state) {
  const CostWeights w = crowd_averse();
  const SimplexState x0 = make_simplex(0.3, 0.3, 0.4);
  const ItvpConfig cfg{static_cast<double>(state.range(0)), 1e-3, 0.5, 1e-9, 2000};
  for (auto _ : state) benchmark::DoNotOptimize(solve_itvp(x0, w, cfg));
}
BENCHMARK(BM_SolveItvp)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SolveStationary(benchmark::State& state) {
  const CostWeights w = crowd_averse();
  for (auto _ : state) benchmark::DoNotOptimize(solve_stationary(w));
}
BENCHMARK(BM_SolveStationary);

void BM_Epidemic(benchmark::State& state) {
  EpidemicParams p;
  p.graph = walpole_graph();
  const NodeTriple x0 = walpole_node11_initial();
  const AttackSchedule sched = AttackSchedule::sequential();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_epidemic(x0, p, sched, 40, 1e-2));
}
BENCHMARK(BM_Epidemic)->Unit(benchmark::kMillisecond);

void BM_Grid(benchmark::State& state) {
  OscillatorParams p;
  p.n = 11;
  const std::vector<double> infection(11, 0.5);
  const AttackSchedule sched = AttackSchedule::low_rate();
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_grid(infection, p, sched, state.range(0), 1e-2, 42));
}
BENCHMARK(BM_Grid)->Arg(1500)->Arg(15000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
