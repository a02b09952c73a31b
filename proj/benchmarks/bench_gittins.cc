#include <benchmark/benchmark.h>

#include <vector>

#include "metasched/gittins.hpp"
#include "metasched/random.hpp"

namespace {

metasched::Matrix sticky_chain(std::size_t n, metasched::Rng& rng) {
  metasched::Matrix p(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double rest = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rest += p(i, j) = rng.uniform();
    }
    for (std::size_t j = 0; j < n; ++j) p(i, j) = j == i ? 0.8 : 0.2 * p(i, j) / rest;
  }
  return p;
}

void BM_GittinsCompute(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  metasched::Rng rng(1);
  const auto p = sticky_chain(n, rng);
  std::vector<double> r(n);
  for (auto& v : r) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(metasched::gittins_compute(p, r, 0.9));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GittinsCompute)->RangeMultiplier(2)->Range(2, 64)->Complexity();

void BM_GittinsSelect(benchmark::State& state) {
  const auto tasks = static_cast<std::size_t>(state.range(0));
  metasched::Rng rng(2);
  std::vector<metasched::Matrix> ps;
  metasched::RewardTable rewards{metasched::Matrix(tasks, 10)};
  for (std::size_t i = 0; i < tasks; ++i) {
    ps.push_back(sticky_chain(10, rng));
    for (std::size_t c = 0; c < 10; ++c) rewards.values(i, c) = rng.uniform();
  }
  const auto table = metasched::gittins_tables(ps, rewards, 0.9);
  std::vector<std::optional<metasched::ClassId>> upcoming(tasks);
  for (auto& u : upcoming) u = rng.index(10);
  for (auto _ : state) benchmark::DoNotOptimize(metasched::gittins_select(table, upcoming));
}
BENCHMARK(BM_GittinsSelect)->Arg(3)->Arg(30)->Arg(300);

}  // namespace
