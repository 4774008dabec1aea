// Serial reference kernels against their OpenMP counterparts.
#include "rg/bench/scene.hpp"
#include "rg/scoring.hpp"

#include <map>

#include <benchmark/benchmark.h>

namespace {

using namespace rg;

const bench::ScenePair& scene(std::size_t n) {
  static std::map<std::size_t, bench::ScenePair> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, bench::generate_scene(ProblemKind::Fundamental, n, 0.5, 1.0, 1)).first;
  return it->second;
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto& s = scene(static_cast<std::size_t>(state.range(0)));
  const ScoringFn fn = make_scoring(ScoringKind::MagsacPP, 3.0, ProblemKind::Fundamental);
  for (auto _ : state) benchmark::DoNotOptimize(score_model(fn, s.truth.model, s.set.items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto& s = scene(static_cast<std::size_t>(state.range(0)));
  const ScoringFn fn = make_scoring(ScoringKind::MagsacPP, 3.0, ProblemKind::Fundamental);
  for (auto _ : state) benchmark::DoNotOptimize(score_model_parallel(fn, s.truth.model, s.set.items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ResidualsSerial(benchmark::State& state) {
  const auto& s = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_residuals(s.truth.model, s.set.items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ResidualsParallel(benchmark::State& state) {
  const auto& s = scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_residuals_parallel(s.truth.model, s.set.items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ScoreSerial)->RangeMultiplier(8)->Range(512, 1 << 18);
BENCHMARK(BM_ScoreParallel)->RangeMultiplier(8)->Range(512, 1 << 18)->UseRealTime();
BENCHMARK(BM_ResidualsSerial)->RangeMultiplier(8)->Range(512, 1 << 18);
BENCHMARK(BM_ResidualsParallel)->RangeMultiplier(8)->Range(512, 1 << 18)->UseRealTime();

BENCHMARK_MAIN();
