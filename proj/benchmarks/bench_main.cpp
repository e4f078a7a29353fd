#include <benchmark/benchmark.h>

#include "rashlab/complexity.hpp"
#include "rashlab/dataset.hpp"
#include "rashlab/models.hpp"
#include "rashlab/rashomon.hpp"
#include "rashlab/resampling.hpp"
#include "rashlab/rng.hpp"
#include "support/synthetic.hpp"

namespace {

rashlab::Dataset bench_dataset(std::size_t n_majority, std::size_t n_minority, std::size_t p) {
  return synthetic::gaussian_blobs({.n_majority = n_majority,
                                    .n_minority = n_minority,
                                    .informative = p / 2,
                                    .noise = p - p / 2,
                                    .separation = 1.5,
                                    .label_noise = 0.05,
                                    .seed = 42});
}

void BM_Knn(benchmark::State& state) {
  const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)) * 3 / 4,
                                static_cast<std::size_t>(state.range(0)) / 4, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rashlab::knn(ds.X, 5));
  }
}
BENCHMARK(BM_Knn)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Smote(benchmark::State& state) {
  const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)), state.range(0) / 4, 10);
  rashlab::BalanceSpec spec;
  spec.method = rashlab::BalanceMethod::smote;
  spec.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rashlab::smote(ds, spec));
  }
}
BENCHMARK(BM_Smote)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  rashlab::Rng rng(3);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.next_double();
    labels[i] = rng.next_index(4) == 0 ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rashlab::auc_score(scores, labels));
  }
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_NeighborhoodMetrics(benchmark::State& state) {
  const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)) * 3 / 4,
                                static_cast<std::size_t>(state.range(0)) / 4, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rashlab::neighborhood_metrics(ds));
  }
}
BENCHMARK(BM_NeighborhoodMetrics)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TrainPool(benchmark::State& state) {
  const auto ds = bench_dataset(300, 100, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rashlab::train_pool(ds, static_cast<std::size_t>(state.range(0)), 11));
  }
}
BENCHMARK(BM_TrainPool)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
