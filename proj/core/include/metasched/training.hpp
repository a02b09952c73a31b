#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metasched/data.hpp"
#include "metasched/learner.hpp"
#include "metasched/scheduler.hpp"

namespace metasched {

/// One row of the metrics file, written after every inner step.
struct MetricsRecord {
  std::size_t k = 0;         // outer epoch, from 1
  std::size_t t = 0;         // inner step within the epoch, from 1
  std::size_t task = 0;
  ClassId upcoming_class = 0;
  double accuracy = 0.0;
  double reward = 0.0;
  double sqrt_t_error = 0.0;
  std::uint64_t samples = 0;  // cumulative over the run
  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

struct TrainingOptions {
  std::size_t batch_size = 4;
  std::size_t epochs = 1;
  double meta_lr = 0.05;
  bool meta_lr_decay = false;  // meta_lr / sqrt(k)
  bool full_meta_val = false;  // otherwise a rotating window of batch_size
  double target_accuracy = 0.8;
};

struct TrainingResult {
  Hyperparams hyperparams;
  std::optional<std::uint64_t> samples_to_target;
  double final_accuracy = 0.0;
  std::uint64_t total_samples = 0;
  std::size_t total_steps = 0;
  std::vector<std::string> notes;  // early-stop reasons
};

/// Inner steps per epoch: floor(floor(sum n_i / N) / B).
std::size_t steps_per_epoch(std::span<const TaskSubset> tasks, std::size_t batch_size);

/// Outer loop over epochs; each epoch rewinds the task cursors, starts from
/// the current initial weights, lets the scheduler pick a task per inner step,
/// scores the pooled validation set, and ends with one meta update.
TrainingResult run_meta_training(const TrainingOptions& options, Hyperparams lambda,
                                 std::span<TaskSubset> tasks, const Dataset& pooled_val,
                                 Scheduler& scheduler, const MetricsSink& sink = {});

}  // namespace metasched
