#include "metasched/training.hpp"

#include <cmath>

#include <fmt/format.h>

#include "metasched/error.hpp"
#include "metasched/logging.hpp"
#include "metasched/reward.hpp"

namespace metasched {

namespace {

// Rows [start, start + count) of val, wrapping at the end.
Dataset rotating_window(const Dataset& val, std::size_t start, std::size_t count) {
  Dataset out;
  out.dim = val.dim;
  out.num_classes = val.num_classes;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t row = (start + j) % val.size();
    out.append(val.view(row, row + 1).x(0), val.labels[row]);
  }
  return out;
}

}  // namespace

std::size_t steps_per_epoch(std::span<const TaskSubset> tasks, std::size_t batch_size) {
  if (tasks.empty()) throw Error(ErrorCode::InvalidArgument, "no tasks");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  std::size_t total = 0;
  for (const auto& task : tasks) total += task.train().size();
  return (total / tasks.size()) / batch_size;
}

TrainingResult run_meta_training(const TrainingOptions& options, Hyperparams lambda,
                                 std::span<TaskSubset> tasks, const Dataset& pooled_val,
                                 Scheduler& scheduler, const MetricsSink& sink) {
  if (pooled_val.size() == 0) throw Error(ErrorCode::EmptyValidationSet, "pooled validation set is empty");
  TrainingResult result;
  if (options.epochs == 0) {
    result.hyperparams = std::move(lambda);
    return result;
  }
  const std::size_t steps = steps_per_epoch(tasks, options.batch_size);
  const std::size_t n_tasks = tasks.size();
  const BatchView val_view = pooled_val.view();

  std::vector<std::optional<ClassId>> upcoming(n_tasks);
  std::vector<ClassId> last_labels(n_tasks, 0);

  for (std::size_t k = 1; k <= options.epochs; ++k) {
    for (std::size_t i = 0; i < n_tasks; ++i) {
      tasks[i].rewind();
      last_labels[i] = tasks[i].peek().value_or(0);
    }
    const double step = lambda.inner_step();
    ModelParams w = lambda.init_params;
    std::vector<double> last_grad;

    for (std::size_t t = 1; t <= steps; ++t) {
      for (std::size_t i = 0; i < n_tasks; ++i) upcoming[i] = tasks[i].peek();
      std::size_t chosen = 0;
      try {
        chosen = scheduler.select({upcoming, last_labels});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AllExhausted) throw;
        result.notes.push_back(fmt::format("epoch {} stopped after {} steps: all tasks exhausted", k, t - 1));
        log_info("{}", result.notes.back());
        break;
      }
      if (chosen >= n_tasks || !upcoming[chosen]) {
        throw Error(ErrorCode::ExhaustedTask, fmt::format("scheduler chose unavailable task {}", chosen));
      }
      const BatchView batch = tasks[chosen].next_batch(options.batch_size);
      last_labels[chosen] = batch.labels.back();

      LossAndGrad lg = loss_and_grad(w, batch);
      auto values = w.values();
      for (std::size_t p = 0; p < values.size(); ++p) values[p] -= step * lg.grad.params[p];
      last_grad = std::move(lg.grad.params);

      const double accuracy = validation_accuracy(w, val_view);
      const RewardSample sample = make_reward_sample(t, accuracy);
      result.total_samples += batch.size();
      ++result.total_steps;
      result.final_accuracy = accuracy;
      scheduler.observe(chosen, sample.scaled);
      if (!result.samples_to_target && accuracy >= options.target_accuracy) {
        result.samples_to_target = result.total_samples;
      }
      if (sink) {
        sink(MetricsRecord{k, t, chosen, *upcoming[chosen], accuracy, sample.scaled,
                           std::sqrt(static_cast<double>(t)) * (1.0 - accuracy), result.total_samples});
      }
    }

    if (last_grad.empty()) continue;
    const Dataset window =
        options.full_meta_val
            ? Dataset{}
            : rotating_window(pooled_val, ((k - 1) * options.batch_size) % pooled_val.size(),
                              std::min(options.batch_size, pooled_val.size()));
    const BatchView meta_val = options.full_meta_val ? val_view : window.view();
    const double eta =
        options.meta_lr_decay ? options.meta_lr / std::sqrt(static_cast<double>(k)) : options.meta_lr;
    lambda = meta_update(lambda, InnerTrace{std::move(w), std::move(last_grad)}, meta_val, eta);
  }
  result.hyperparams = std::move(lambda);
  return result;
}

}  // namespace metasched
