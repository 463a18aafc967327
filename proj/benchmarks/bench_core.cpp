#include <benchmark/benchmark.h>

#include <cmath>

#include "strichlab/exponents.hpp"
#include "strichlab/mixednorm.hpp"
#include "strichlab/spectral.hpp"

using namespace strichlab;

namespace {

spectral::Field gaussian(const spectral::Grid& g) {
  return spectral::sample(g, [&](const spectral::Point& x) {
    double r2 = 0.0;
    for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
    return spectral::cplx(std::exp(-0.5 * r2));
  });
}

void BM_Propagate2d(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto g = spectral::make_grid(2, m, 0.25 * m);
  const auto u = gaussian(g);
  const exponents::DispersionSetup s{2.0, 2};
  for (auto _ : state) benchmark::DoNotOptimize(spectral::propagate(s, 1.0, u));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Propagate2d)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
  const auto g = spectral::make_grid(2, 256, 64);
  const auto u = gaussian(g);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::project(1.0, u));
}
BENCHMARK(BM_Project)->Unit(benchmark::kMillisecond);

void BM_ZSpqNorm(benchmark::State& state) {
  const auto g = spectral::make_grid(2, 128, 32);
  const exponents::DispersionSetup s{2.0, 2};
  const auto slab = spectral::free_evolution(s, gaussian(g), 0.0, 1.0 / 16, 17);
  const mixednorm::ZContext ctx{mixednorm::RangeSpace::lebesgue, nullptr, {}};
  for (auto _ : state) benchmark::DoNotOptimize(mixednorm::z_spq_norm(slab, 0.1, 0.3, 0.25, ctx));
}
BENCHMARK(BM_ZSpqNorm)->Unit(benchmark::kMillisecond);

void BM_SigmaSearch(benchmark::State& state) {
  const exponents::DispersionSetup s{2.0, 3};
  const auto t = exponents::ExponentTuple::from_exponents(2, 4, 2, 4, 0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(exponents::sigma_feasibility_search(s, t, exponents::Mode::sharp));
}
BENCHMARK(BM_SigmaSearch)->Unit(benchmark::kMicrosecond);

void BM_SigmaSearchInfeasible(benchmark::State& state) {
  const exponents::DispersionSetup s{2.0, 3};
  const auto t = exponents::ExponentTuple::from_exponents(2, 6, 2, 6, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(exponents::sigma_feasibility_search(s, t, exponents::Mode::sharp));
}
BENCHMARK(BM_SigmaSearchInfeasible)->Unit(benchmark::kMicrosecond);

void BM_Region(benchmark::State& state) {
  const exponents::DispersionSetup s{2.0, 3};
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exponents::region_sample(s, 0.3, 0.3, 0.0, res, true));
}
BENCHMARK(BM_Region)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
