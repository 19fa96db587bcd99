#include <benchmark/benchmark.h>

#include "sparselab/box_operator.hpp"
#include "sparselab/eigensolve.hpp"
#include "sparselab/green.hpp"
#include "sparselab/lattice.hpp"
#include "sparselab/oscillatory.hpp"
#include "sparselab/propagate.hpp"

namespace {

using namespace sparselab;

// Fresh kernel per iteration so the cache never answers.
void BM_GreenUncached(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Site n = Site::on_axis(d, 0, 5);
  for (auto _ : state) {
    GreenKernel green(d);
    benchmark::DoNotOptimize(green(-1.0, n));
  }
}
BENCHMARK(BM_GreenUncached)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_GreenCached(benchmark::State& state) {
  const GreenKernel green(3);
  const Site n = Site::on_axis(3, 0, 5);
  green(-1.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(green(-1.0, n));
}
BENCHMARK(BM_GreenCached);

void BM_FreePropagate(benchmark::State& state) {
  const LatticeBox box(2, state.range(0), Boundary::periodic);
  const auto f = LatticeField::delta(box, Site::origin(2));
  for (auto _ : state) benchmark::DoNotOptimize(free_propagate(f, 10.0));
}
BENCHMARK(BM_FreePropagate)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ChebyshevPropagate(benchmark::State& state) {
  const LatticeBox box(2, state.range(0), Boundary::periodic);
  const BoxOperator H(box, Potential(2, {{Site({0, 0}), -1.0}, {Site({4, 0}), -0.5}}));
  const auto f = LatticeField::delta(box, Site::origin(2));
  for (auto _ : state) benchmark::DoNotOptimize(full_propagate(H, f, 10.0));
}
BENCHMARK(BM_ChebyshevPropagate)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_EigsChain(benchmark::State& state) {
  const Coord R = state.range(0);
  const SparseRule rule{SparseFamily::power_axis, 1, 2.0, 1, false, 0, {}};
  const auto V = sample_potential(1, sparse_support(rule, R).sites, 1.5, 7);
  const BoxOperator H(LatticeBox(1, R, Boundary::dirichlet), V);
  for (auto _ : state) benchmark::DoNotOptimize(eigs_in_window(H, {-3.0, 0.0}, 64));
}
BENCHMARK(BM_EigsChain)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_EigsShiftInvert(benchmark::State& state) {
  const Coord R = state.range(0);
  const SparseRule rule{SparseFamily::power_axis, 2, 2.0, 1, true, 0, {}};
  const auto V = sample_potential(2, sparse_support(rule, R).sites, 1.5, 7);
  const BoxOperator H(LatticeBox(2, R, Boundary::dirichlet), V);
  for (auto _ : state) benchmark::DoNotOptimize(eigs_in_window(H, {-3.0, 0.0}, 32));
}
BENCHMARK(BM_EigsShiftInvert)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_QIntegral(benchmark::State& state) {
  QIntegralSpec spec;
  spec.js = {Site({state.range(0), 0})};
  for (auto _ : state) benchmark::DoNotOptimize(q_integral(spec, spec.js.front()));
}
BENCHMARK(BM_QIntegral)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
