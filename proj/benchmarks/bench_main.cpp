#include <benchmark/benchmark.h>

#include <vector>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/eval.hpp"
#include "ordinal_crc/rng.hpp"
#include "ordinal_crc/sets.hpp"
#include "ordinal_crc/simgen.hpp"

namespace {

using namespace ordinal_crc;

ScoreVector random_scores(int k, Rng& rng) {
  std::vector<double> p(static_cast<size_t>(k));
  double sum = 0.0;
  for (double& x : p) sum += (x = rng.uniform(0.01, 1.0));
  for (double& x : p) x /= sum;
  return ScoreVector{std::move(p)};
}

void bm_weighted_chain(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Rng rng(1, 0);
  const auto scores = random_scores(k, rng);
  const auto w = WeightScheme::equal(k);
  for (auto _ : state) {
    auto chain = weighted_chain(scores, w);
    benchmark::DoNotOptimize(chain);
  }
}
BENCHMARK(bm_weighted_chain)->Arg(10)->Arg(100);

void bm_divergence_chain(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Rng rng(2, 0);
  const auto scores = random_scores(k, rng);
  for (auto _ : state) {
    auto chain = divergence_chain(scores);
    benchmark::DoNotOptimize(chain);
  }
}
BENCHMARK(bm_divergence_chain)->Arg(10)->Arg(100);

void bm_sample_breakpoints(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Rng rng(3, 0);
  const LabeledScore row{random_scores(k, rng), k / 2};
  const auto loss = LossSpec::weighted(WeightScheme::equal(k));
  for (auto _ : state) {
    auto bp = sample_breakpoints(row, loss);
    benchmark::DoNotOptimize(bp);
  }
}
BENCHMARK(bm_sample_breakpoints)->Arg(10)->Arg(100);

std::vector<LabeledScore> bench_rows(int n, int k) {
  Rng rng(4, 0);
  std::vector<LabeledScore> rows;
  rows.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rows.push_back({random_scores(k, rng), static_cast<ClassIndex>(rng.below(static_cast<uint64_t>(k)))});
  }
  return rows;
}

void bm_calibrate_exact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rows = bench_rows(n, 10);
  const auto loss = LossSpec::weighted(WeightScheme::equal(10));
  for (auto _ : state) {
    auto result = calibrate_exact(rows, 0.1, loss);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(bm_calibrate_exact)->Arg(200)->Arg(2000);

void bm_calibrate_binary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto rows = bench_rows(n, 10);
  const auto loss = LossSpec::weighted(WeightScheme::equal(10));
  for (auto _ : state) {
    auto result = calibrate_binary(rows, 0.1, loss, 1e-4);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(bm_calibrate_binary)->Arg(200)->Arg(2000);

void bm_bayes_posterior(benchmark::State& state) {
  const auto specs = simgen::make_default_specs(10, 7);
  for (auto _ : state) {
    auto posterior = simgen::bayes_posterior({4.3, 5.1}, specs);
    benchmark::DoNotOptimize(posterior);
  }
}
BENCHMARK(bm_bayes_posterior);

void bm_run_trials(benchmark::State& state) {
  const auto rows = simgen::simulate_scores(simgen::make_default_specs(10, 7), 100, 8);
  const auto loss = LossSpec::weighted(WeightScheme::equal(10));
  for (auto _ : state) {
    auto report = eval::run_trials(rows, 0.1, loss, 10, 0.5, 3);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(bm_run_trials);

}  // namespace

BENCHMARK_MAIN();
