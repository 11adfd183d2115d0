#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/elliptic.hpp"
#include "chemohapto/grid.hpp"

using namespace chemohapto;

namespace {

Field2D smooth(const Grid& g, double base) {
  return Field2D::from_function(g, [base](double x, double y) {
    return base + 0.5 * std::cos(std::numbers::pi * x) * std::cos(2 * std::numbers::pi * y);
  });
}

void BM_Laplacian(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const Field2D f = smooth(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_neumann(f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Laplacian)->Arg(64)->Arg(128)->Arg(256);

void BM_Transport(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const Field2D u = smooth(g, 1.0), phi = smooth(g, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(upwind_transport_step(u, phi, 1e-4));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Transport)->Arg(64)->Arg(128)->Arg(256);

void BM_HelmholtzSolve(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const Field2D b = smooth(g, 1.0);
  HelmholtzSolver solver(g);
  const bool pre = state.range(1) != 0;
  for (auto _ : state) {
    Field2D x(g);
    benchmark::DoNotOptimize(solver.solve(1.0, 1e-3, b, x, 1e-10, 0, pre));
  }
}
BENCHMARK(BM_HelmholtzSolve)->Args({128, 1})->Args({128, 0})->Args({256, 1});

void BM_GnEstimate(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gn_estimate(g, 4, 2, 2));
}
BENCHMARK(BM_GnEstimate)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
