#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "chemohapto/diagnostics.hpp"
#include "chemohapto/solver.hpp"

using namespace chemohapto;

namespace {

struct Setup {
  ModelParams params;
  InitialData ic;
};

Setup setup(int n, double tau) {
  Setup s;
  s.params.chi = 1.0;
  s.params.xi = 0.5;
  s.params.tau = tau;
  s.params.kinetics = KineticSpec::logistic(1.0);
  s.params.grid = Grid(n, n);
  const double pi = std::numbers::pi;
  s.ic.u0 = Field2D::from_function(s.params.grid, [pi](double x, double y) {
    return 1.0 + 0.5 * std::cos(pi * x) * std::cos(pi * y);
  });
  s.ic.v0 = Field2D(s.params.grid, 0.5);
  s.ic.w0 = Field2D::from_function(s.params.grid, [pi](double, double y) { return 0.5 + 0.25 * std::cos(pi * y); });
  s.ic.validate(s.params);
  return s;
}

void BM_Step(benchmark::State& state) {
  const Setup su = setup(static_cast<int>(state.range(0)), static_cast<double>(state.range(1)));
  Solver solver(su.params, NumericsConfig{});
  State s = solver.initial_state(su.ic);
  for (auto _ : state) solver.step(s, 1e-4);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(su.params.grid.size()));
}
BENCHMARK(BM_Step)->Args({64, 0})->Args({128, 0})->Args({128, 1})->Args({256, 1});

void BM_Record(benchmark::State& state) {
  const Setup su = setup(static_cast<int>(state.range(0)), 1.0);
  Solver solver(su.params, NumericsConfig{});
  const State s = solver.initial_state(su.ic);
  const DerivedConstants d = derive_constants(su.params, su.ic);
  for (auto _ : state) benchmark::DoNotOptimize(make_record(s, su.params, d, 1));
}
BENCHMARK(BM_Record)->Arg(128);

}  // namespace
