// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <memory>

#include "heurlab/experiment.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/model.hpp"

using namespace heurlab;

namespace {

std::vector<PuzzleInstance> bench_mazes(int n) {
  std::vector<PuzzleInstance> out;
  GenFilter f;
  f.min_plan_length = 30;
  f.alpha = 3.5;
  for (int i = 0; i < n; ++i) {
    out.push_back(generate_maze(30, 30, f, 1000 + static_cast<std::uint64_t>(i)));
    out.back().id = "bench-" + std::to_string(i);
  }
  return out;
}

const std::vector<PuzzleInstance>& mazes() {
  static const auto m = bench_mazes(64);
  return m;
}

const ResidualModel& knn() {
  static const auto model = ResidualModel::fit(solve_and_extract(mazes()).examples, ModelKind::Knn, 8, 0.0);
  return model;
}

FeatureMatrix queries(std::size_t rows) {
  FeatureMatrix m;
  const auto pool = solve_and_extract(std::span(mazes()).first(8)).examples;
  m.cols = pool.front().features.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& f = pool[r % pool.size()].features;
    m.data.insert(m.data.end(), f.begin(), f.end());
  }
  m.rows = rows;
  return m;
}

void BM_PredictSerial(benchmark::State& state) {
  const auto batch = queries(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn().predict_batch_serial(batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PredictParallel(benchmark::State& state) {
  const auto batch = queries(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn().predict_batch(batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ExperimentConfig quick_config() {
  ExperimentConfig c;
  c.instances = mazes();
  c.make_evaluator = [](const PuzzleInstance&, std::uint64_t) { return std::make_shared<const QuickHeuristic>(); };
  return c;
}

void BM_ExperimentSerial(benchmark::State& state) {
  static const auto refs = compute_references(mazes());
  const auto config = quick_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(config, refs));
}

void BM_ExperimentParallel(benchmark::State& state) {
  static const auto refs = compute_references(mazes());
  const auto config = quick_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config, refs));
}

}  // namespace

BENCHMARK(BM_PredictSerial)->Arg(64)->Arg(1024);
BENCHMARK(BM_PredictParallel)->Arg(64)->Arg(1024);
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
