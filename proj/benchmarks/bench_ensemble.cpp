// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "symneg/commands.hpp"
#include "symneg/negativity.hpp"
#include "symneg/resolvent.hpp"

using namespace symneg;

namespace {

SectorGeometry zr_geom(int R, int n_a1, int n_a2, int n_b) {
  return SectorGeometry(SymmetrySpec::zr(R), n_a1, n_a2, n_b, 0, 0);
}

void BM_SampleBlock(benchmark::State& state) {
  auto g = zr_geom(2, 3, 3, int(state.range(0)));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_block(g, i++, 42).x.sum());
  state.SetItemsProcessed(std::int64_t(state.iterations()) * g.dim_a() * g.dim_b());
}
BENCHMARK(BM_SampleBlock)->Arg(7)->Arg(10);

void BM_BuildRho(benchmark::State& state) {
  auto g = zr_geom(2, 3, 3, int(state.range(0)));
  auto block = sample_block(g, 0, 42);
  for (auto _ : state) benchmark::DoNotOptimize(build_rho(block).rho.trace());
}
BENCHMARK(BM_BuildRho)->Arg(7)->Arg(10);

void BM_PtSpectrum(benchmark::State& state) {
  auto g = zr_geom(int(state.range(0)), 3, 3, 5);
  auto rho = build_rho(sample_block(g, 0, 42));
  for (auto _ : state) {
    auto s = pt_spectrum(rho);
    benchmark::DoNotOptimize(s.p1_eigenvalues.back());
  }
}
BENCHMARK(BM_PtSpectrum)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CubicDensityScan(benchmark::State& state) {
  auto g = zr_geom(3, 6, 2, 5);
  for (auto _ : state) {
    auto m = zr_cubic_density(g, ZrCubic::kG2, 2001);
    benchmark::DoNotOptimize(m.support.size());
  }
}
BENCHMARK(BM_CubicDensityScan)->Unit(benchmark::kMillisecond);

void BM_UnprojectedFixedPoint(benchmark::State& state) {
  auto g = zr_geom(2, 2, 2, 8);
  auto grid = symmetric_grid(0.5, 401);
  for (auto _ : state) {
    auto fp = unprojected_fixed_point(g, grid, {});
    benchmark::DoNotOptimize(fp.total_density.back());
  }
}
BENCHMARK(BM_UnprojectedFixedPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
