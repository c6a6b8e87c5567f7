#include "drm/asymptotics.hpp"
#include "drm/montecarlo.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_TableCell(benchmark::State& state) {
  drm::SimCell c;
  c.mu1 = 1.0;
  c.n1 = 10;
  c.n2 = static_cast<int>(state.range(0));
  c.lambda = 0.5;
  c.reps = 1000;
  c.seed = 20080601;
  c.penalty_scale = drm::kStudyPenaltyScale;
  for (auto _ : state) benchmark::DoNotOptimize(drm::run_table_cell(c, {1}));
}
BENCHMARK(BM_TableCell)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_PopulationMatrices(benchmark::State& state) {
  const auto dist = drm::DistSpec::lognormal(0.0, 1.0);
  const auto th = drm::lognormal_true_theta(1.0, 0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(drm::population_matrices(dist, th, 1.0, drm::HTransform::log()));
  }
}
BENCHMARK(BM_PopulationMatrices);

}  // namespace
