#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kernels.hpp"

// Throughput of the parallel kernels against their serial twins on a
// flow-sized grid. Run cmake --build build --target bench_kernels and then
// ./build/bench/bench_kernels --benchmark_min_time=1.

using namespace malab;

namespace {

ScalarField bowl_with_waves(int m) {
  const GridSpec g = GridSpec::square_box(-3.0, 3.0, m);
  return ScalarField::sample(g, [](Point x) {
    return dot(x, x) + 0.05 * std::sin(3.0 * x[0]) * std::sin(2.0 * x[1]);
  });
}

void bm_hessian_omp(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  SymmetricMatrixField H = SymmetricMatrixField::zeros(u.grid, 2);
  for (auto _ : state) {
    kernels::hessian(u, H);
    benchmark::DoNotOptimize(H.xx.data());
  }
}

void bm_hessian_serial(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  SymmetricMatrixField H = SymmetricMatrixField::zeros(u.grid, 2);
  for (auto _ : state) {
    kernels::serial::hessian(u, H);
    benchmark::DoNotOptimize(H.xx.data());
  }
}

void bm_third_sup_omp(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::third_sup_sq(u));
}

void bm_third_sup_serial(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::third_sup_sq(u));
}

void bm_flow_step_omp(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  std::vector<double> out(u.values.size(), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::flow_step(u, nullptr, 1e-5, 1.0, out));
  }
}

void bm_flow_step_serial(benchmark::State& state) {
  const ScalarField u = bowl_with_waves(static_cast<int>(state.range(0)));
  std::vector<double> out(u.values.size(), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::serial::flow_step(u, nullptr, 1e-5, 1.0, out));
  }
}

}  // namespace

BENCHMARK(bm_hessian_omp)->Arg(257)->Arg(513);
BENCHMARK(bm_hessian_serial)->Arg(257)->Arg(513);
BENCHMARK(bm_third_sup_omp)->Arg(257)->Arg(513);
BENCHMARK(bm_third_sup_serial)->Arg(257)->Arg(513);
BENCHMARK(bm_flow_step_omp)->Arg(257)->Arg(513);
BENCHMARK(bm_flow_step_serial)->Arg(257)->Arg(513);

BENCHMARK_MAIN();
