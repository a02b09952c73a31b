#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "metasched/markov.hpp"
#include "metasched/numerics.hpp"
#include "metasched/reward.hpp"

namespace metasched {

struct GittinsIndices {
  Vector indices;                // v(c) per state
  std::vector<ClassId> ordering; // states by non-increasing index
};

/// Largest-remaining-index algorithm. The top state is argmax r with index
/// r; each later state maximises d/b over the not-yet-ranked states, where
/// d = (I - beta Q)^-1 r, b = (I - beta Q)^-1 1 and Q keeps only the columns
/// of P that point into the already-ranked set.
GittinsIndices gittins_compute(const Matrix& transitions, std::span<const double> rewards,
                               double beta);

/// Per-task index tables, computed once before training.
struct GittinsTable {
  double beta = 0.9;
  Matrix indices;                              // N x C
  std::vector<std::vector<ClassId>> orderings; // per task

  std::size_t num_tasks() const noexcept { return indices.rows(); }
};

GittinsTable gittins_tables(std::span<const Matrix> transitions, const RewardTable& rewards,
                            double beta);

/// argmax over tasks of indices[i][upcoming[i]]; tasks with no upcoming label
/// are skipped. Throws AllExhausted when every task is done.
std::size_t gittins_select(const GittinsTable& table,
                           std::span<const std::optional<ClassId>> upcoming);

}  // namespace metasched
