#include <benchmark/benchmark.h>

#include "siggame/cheap_talk.hpp"
#include "siggame/montecarlo.hpp"
#include "siggame/reference_case.hpp"
#include "siggame/signaling_multi.hpp"
#include "siggame/signaling_scalar.hpp"

using namespace siggame;

static void BM_SolveAffineNash(benchmark::State& state) {
  ScalarGameSpec spec{1.3, 0.8, 0.2, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_affine_nash(spec));
  }
}
BENCHMARK(BM_SolveAffineNash);

static void BM_TMapMatrix4d(benchmark::State& state) {
  auto spec = reference_case_4d();
  Eigen::MatrixXd a = reference_fixed_points_4d()[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(t_map_matrix(a, spec));
  }
}
BENCHMARK(BM_TMapMatrix4d);

static void BM_FixedPoint4d(benchmark::State& state) {
  auto spec = reference_case_4d();
  Eigen::MatrixXd start =
      reference_fixed_points_4d()[0] +
      Eigen::MatrixXd::Constant(4, 4, 1e-3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_fixed_point(spec, start, 0.5, 1e-10, 5000));
  }
}
BENCHMARK(BM_FixedPoint4d);

static void BM_QuantizerSolve(benchmark::State& state) {
  CheapTalkSpec spec{SourceModel::uniform(0, 1), 0.02};
  int bins = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_quantizer_equilibrium(spec, bins));
  }
}
BENCHMARK(BM_QuantizerSolve)->Arg(2)->Arg(4);

static void BM_WaterFill(benchmark::State& state) {
  std::vector<double> eigenvalues;
  for (int i = 0; i < state.range(0); ++i)
    eigenvalues.push_back(0.5 + 0.1 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(water_fill(1.25, eigenvalues));
  }
}
BENCHMARK(BM_WaterFill)->Arg(4)->Arg(64);

static void BM_EstimateCosts(benchmark::State& state) {
  ScalarGameSpec spec{1, 1, 0.25, 0.1};
  auto pair = nash_informative_pair(spec);
  SimConfig cfg{state.range(0), 7, false};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_costs(pair, spec, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_samples);
}
BENCHMARK(BM_EstimateCosts)->Arg(100000);

BENCHMARK_MAIN();
