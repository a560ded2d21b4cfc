#include <benchmark/benchmark.h>

#include <cmath>

#include "dpgeo/dp_solver.hpp"
#include "dpgeo/geometry.hpp"
#include "dpgeo/spectral.hpp"

using namespace dpgeo;

namespace {

Field gaussian(std::size_t n) {
  return Field::sample(Grid(30.0, n), [](double x) { return std::exp(-0.5 * x * x); });
}

void BM_dp_rhs(benchmark::State& st) {
  const Field u = gaussian(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dp_rhs(u));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_dp_rhs)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

void BM_step(benchmark::State& st) {
  const SolverState s(0.0, gaussian(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(step(s, 1e-3));
}
BENCHMARK(BM_step)->RangeMultiplier(4)->Range(256, 16384);

void BM_interpolate(benchmark::State& st) {
  const Field u = gaussian(static_cast<std::size_t>(st.range(0)));
  const SpectralInterpolant si(u);
  double x = -1.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(si.value(x));
    x += 1e-3;
  }
}
BENCHMARK(BM_interpolate)->Arg(1024)->Arg(4096);

void BM_green_convolution(benchmark::State& st) {
  const Field u = gaussian(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(green_convolution(u));
}
BENCHMARK(BM_green_convolution)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_curvature(benchmark::State& st) {
  const SolverState s(0.0, gaussian(1024));
  const CoframeField cf = coframe(s, {0.5, 1});
  for (auto _ : st) benchmark::DoNotOptimize(gauss_curvature(s, cf));
}
BENCHMARK(BM_curvature);

}  // namespace

BENCHMARK_MAIN();
