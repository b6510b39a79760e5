#include <benchmark/benchmark.h>

#include "numrange/boundary.hpp"
#include "numrange/eigencurves.hpp"
#include "numrange/maxent.hpp"
#include "numrange/oracle.hpp"

using namespace numrange;

namespace {

SquareComplexMatrix random_matrix(int d) {
  SeededSampler rng(static_cast<std::uint64_t>(d));
  const CMatrix m = rng.ginibre(d);
  return SquareComplexMatrix(m / spectral_norm(m));
}

void BM_Eigh(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SquareComplexMatrix a = random_matrix(d);
  const HermitianMatrix h = rotated_real_part(a, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_TrackBranches(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SquareComplexMatrix a = random_matrix(d);
  for (auto _ : state) benchmark::DoNotOptimize(track_branches(a, AngleGrid(1024)));
}
BENCHMARK(BM_TrackBranches)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const SquareComplexMatrix a = random_matrix(4);
  for (auto _ : state) benchmark::DoNotOptimize(classify_boundary(a));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

void BM_MaxEntInterior(benchmark::State& state) {
  const SquareComplexMatrix a = random_matrix(4);
  const cplx z = a.entries().trace() / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(maxent_interior(a, z));
}
BENCHMARK(BM_MaxEntInterior);

}  // namespace
BENCHMARK_MAIN();
