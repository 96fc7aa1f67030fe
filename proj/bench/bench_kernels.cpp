// Serial reference kernels vs the OpenMP ones on the same synthetic cohort.

#include <map>

#include <benchmark/benchmark.h>

#include "cthmm/learning.hpp"
#include "cthmm/synthesis.hpp"

using namespace cthmm;

namespace {

struct Fixture {
  BinningScheme binning{{{"heart_rate", 40.0, 150.0, 5}, {"systolic_bp", 40.0, 200.0, 5}}};
  MixtureModel truth = example_mixture(1, 4, binning, MaskKind::Full, 1);
  std::vector<Trajectory> cohort;
  SufficientStats stats{4, binning.bin_counts()};

  explicit Fixture(std::size_t patients) {
    cohort = sample_cohort(truth, patients, {}, 0.2, 1).trajectories;
    stats = e_step(truth.subtypes[0], cohort);
  }
};

const Fixture& fixture(std::size_t patients) {
  static std::map<std::size_t, Fixture> cache;
  return cache.try_emplace(patients, patients).first->second;
}

void BM_EStepReference(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::e_step(f.truth.subtypes[0], f.cohort));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EStepParallel(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(e_step(f.truth.subtypes[0], f.cohort));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GeneratorReference(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::m_step_generator(f.stats, f.truth.subtypes[0].generator));
  state.counters["gap_keys"] = static_cast<double>(f.stats.transition_counts.size());
}

void BM_GeneratorParallel(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(m_step_generator(f.stats, f.truth.subtypes[0].generator));
  state.counters["gap_keys"] = static_cast<double>(f.stats.transition_counts.size());
}

}  // namespace

BENCHMARK(BM_EStepReference)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EStepParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeneratorReference)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeneratorParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
