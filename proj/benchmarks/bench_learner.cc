#include <benchmark/benchmark.h>

#include <vector>

#include "metasched/learner.hpp"
#include "metasched/random.hpp"
#include "metasched/reward.hpp"

namespace {

metasched::Dataset gaussian_batch(std::size_t n, std::size_t dim, std::size_t classes) {
  metasched::Rng rng(3);
  metasched::Dataset ds;
  ds.dim = dim;
  ds.num_classes = classes;
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = rng.normal();
    ds.append(x, rng.index(classes));
  }
  return ds;
}

void BM_InnerStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto hidden = static_cast<std::size_t>(state.range(1));
  const auto batch = gaussian_batch(4, dim, 10);
  auto w = metasched::ModelParams::random({dim, hidden, 10}, 0.01, 1);
  for (auto _ : state) {
    w = metasched::inner_sgd_step(w, batch.view(), 0.01);
    benchmark::DoNotOptimize(w.values().data());
  }
}
BENCHMARK(BM_InnerStep)->Args({24, 0})->Args({784, 0})->Args({784, 32});

void BM_ValidationAccuracy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto val = gaussian_batch(n, 24, 4);
  const auto w = metasched::ModelParams::random({24, 0, 4}, 0.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metasched::validation_accuracy(w, val.view()));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ValidationAccuracy)->Arg(100)->Arg(1000);

}  // namespace
