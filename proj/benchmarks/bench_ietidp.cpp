#include "ietidp/assembly.hpp"
#include "ietidp/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace ietidp;

namespace {

const SourceFunction kSine = [](const Eigen::Vector2d& x) {
  const double pi = std::numbers::pi;
  return 2 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
};

// args: p, r
void BM_AssembleRingPatch(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0)), r = static_cast<int>(state.range(1));
  const MultiPatch mp = default_ring().discretize(p, r, p - 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_local(mp, 0, kSine, {}));
  state.counters["dofs"] = mp.space(0).size();
}
BENCHMARK(BM_AssembleRingPatch)->Args({2, 4})->Args({3, 4})->Args({6, 4})->Unit(benchmark::kMillisecond);

void BM_SetupRing(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0)), r = static_cast<int>(state.range(1));
  const MultiPatch mp = default_ring().discretize(p, r, p - 1);
  for (auto _ : state) benchmark::DoNotOptimize(IetiSolver(mp, kSine));
}
BENCHMARK(BM_SetupRing)->Args({2, 3})->Args({3, 4})->Unit(benchmark::kMillisecond);

void BM_SolveRing(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0)), r = static_cast<int>(state.range(1));
  const MultiPatch mp = default_ring().discretize(p, r, p - 1);
  SolverOptions o;
  o.kappa_probe = false;
  const IetiSolver solver(mp, kSine, o);
  int it = 0;
  for (auto _ : state) {
    const SolveReport rep = solver.solve();
    it = rep.iterations;
    benchmark::DoNotOptimize(rep.lambda.data());
  }
  state.counters["iterations"] = it;
  state.counters["multipliers"] = solver.operators().num_multipliers();
}
BENCHMARK(BM_SolveRing)->Args({2, 3})->Args({3, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
