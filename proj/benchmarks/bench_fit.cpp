#include "drm/inference.hpp"
#include "drm/solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

drm::DesignData design(int n, int d) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> z;
  Eigen::MatrixXd t1(n, d), t2(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      t1(i, k) = z(gen) + 0.5;
      t2(i, k) = z(gen);
    }
  }
  return drm::make_design(t1, t2);
}

void BM_Fit(benchmark::State& state) {
  const auto d = design(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const drm::PenaltySpec spec{2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(drm::fit(d, spec));
}
BENCHMARK(BM_Fit)->Args({10, 1})->Args({100, 1})->Args({1000, 1})->Args({100, 3});

void BM_FitAndSandwich(benchmark::State& state) {
  const auto d = design(static_cast<int>(state.range(0)), 1);
  const drm::PenaltySpec spec{2.0, 1.0};
  for (auto _ : state) {
    const auto f = drm::fit(d, spec);
    benchmark::DoNotOptimize(drm::sandwich_sigma(d, f.theta, spec));
  }
}
BENCHMARK(BM_FitAndSandwich)->Arg(10)->Arg(200);

void BM_SeparationLp(benchmark::State& state) {
  const auto d = design(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(drm::detect_separation_lp(d));
}
BENCHMARK(BM_SeparationLp)->Arg(10)->Arg(50);

}  // namespace
