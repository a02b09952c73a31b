#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "metasched/data.hpp"
#include "metasched/learner.hpp"
#include "metasched/numerics.hpp"

namespace metasched {

struct RewardSample {
  std::size_t t = 1;
  double accuracy = 0.0;
  double scaled = 0.0;
};

/// N x C table of probe rewards, one row per task.
struct RewardTable {
  Matrix values;

  std::size_t num_tasks() const noexcept { return values.rows(); }
  std::size_t num_classes() const noexcept { return values.cols(); }
  double operator()(std::size_t task, ClassId c) const noexcept { return values(task, c); }
};

/// Fraction of examples whose predicted class equals the label.
/// Throws EmptyValidationSet.
double validation_accuracy(const ModelParams& model, const BatchView& val);

/// 1 - sqrt(t) * (1 - accuracy), t >= 1.
double scaled_reward(std::size_t t, double accuracy);
RewardSample make_reward_sample(std::size_t t, double accuracy);

/// For each (task i, class c): one SGD step of size `inner_step` from
/// init_model on the first training example of class c in task i, scored by
/// validation accuracy at t = 1. Classes run over [0, num_classes).
/// Throws MissingClass when task i never shows class c.
RewardTable probe_reward_table(const ModelParams& init_model, std::span<const TaskSubset> tasks,
                               const BatchView& val, double inner_step, std::size_t num_classes);

/// Per-task probe used to seed UCB: one step on the task's first batch of
/// size B, scored at t = 1.
std::vector<double> probe_first_batch(const ModelParams& init_model,
                                      std::span<const TaskSubset> tasks, const BatchView& val,
                                      double inner_step, std::size_t batch_size);

}  // namespace metasched
