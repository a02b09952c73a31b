#include <benchmark/benchmark.h>

#include <vector>

#include "metasched/mdp.hpp"
#include "metasched/random.hpp"

namespace {

// N tasks of C classes each: C^N joint states, N actions.
metasched::MdpPolicy product_mdp(std::size_t tasks, std::size_t classes) {
  metasched::Rng rng(7);
  std::vector<metasched::Matrix> ps;
  metasched::RewardTable rewards{metasched::Matrix(tasks, classes)};
  for (std::size_t i = 0; i < tasks; ++i) {
    metasched::Matrix p(classes, classes, 0.0);
    for (std::size_t a = 0; a < classes; ++a) {
      double sum = 0.0;
      for (std::size_t b = 0; b < classes; ++b) sum += p(a, b) = rng.uniform() + (a == b ? classes : 0.0);
      for (std::size_t b = 0; b < classes; ++b) p(a, b) /= sum;
      rewards.values(i, a) = rng.uniform();
    }
    ps.push_back(p);
  }
  return metasched::mdp_build(ps, rewards, 0.9);
}

void BM_MdpSolveLp(benchmark::State& state) {
  const auto mdp = product_mdp(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(metasched::mdp_solve_lp(mdp));
  state.counters["states"] = static_cast<double>(mdp.num_states());
}
BENCHMARK(BM_MdpSolveLp)->Args({2, 3})->Args({2, 6})->Args({3, 4})->Args({3, 5})->Unit(benchmark::kMillisecond);

void BM_MdpValueIteration(benchmark::State& state) {
  const auto mdp = product_mdp(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(metasched::mdp_value_iteration(mdp, 1e-8));
  state.counters["states"] = static_cast<double>(mdp.num_states());
}
BENCHMARK(BM_MdpValueIteration)->Args({2, 3})->Args({2, 6})->Args({3, 4})->Args({3, 5})->Unit(benchmark::kMillisecond);

void BM_MdpBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(product_mdp(3, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_MdpBuild)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
