#include "metasched/baselines.hpp"

#include <vector>

#include "metasched/error.hpp"

namespace metasched {

std::size_t cyclic_select(CyclicState& state, std::span<const bool> available) {
  for (std::size_t step = 0; step < state.num_tasks; ++step) {
    const std::size_t task = (state.next_task + step) % state.num_tasks;
    if (available.empty() || available[task]) {
      state.next_task = (task + 1) % state.num_tasks;
      return task;
    }
  }
  throw Error(ErrorCode::AllExhausted, "every task is exhausted");
}

std::size_t random_select(Rng& rng, std::size_t num_tasks, std::span<const bool> available) {
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < num_tasks; ++i) {
    if (available.empty() || available[i]) open.push_back(i);
  }
  if (open.empty()) throw Error(ErrorCode::AllExhausted, "every task is exhausted");
  return open[rng.index(open.size())];
}

}  // namespace metasched
