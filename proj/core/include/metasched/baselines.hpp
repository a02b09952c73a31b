#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "metasched/random.hpp"

namespace metasched {

/// Round-robin over tasks, skipping exhausted ones.
struct CyclicState {
  std::size_t num_tasks = 0;
  std::size_t next_task = 0;
};

/// Returns the chosen task and advances next_task past it.
/// Throws AllExhausted when nothing is available.
std::size_t cyclic_select(CyclicState& state, std::span<const bool> available = {});

/// Uniform over available tasks using the caller's seeded generator.
std::size_t random_select(Rng& rng, std::size_t num_tasks, std::span<const bool> available = {});

}  // namespace metasched
