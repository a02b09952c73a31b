#include "metasched/reward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metasched/error.hpp"

namespace metasched {

double validation_accuracy(const ModelParams& model, const BatchView& val) {
  if (val.empty()) throw Error(ErrorCode::EmptyValidationSet, "validation set is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (predict(model, val.x(i)) == val.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(val.size());
}

double scaled_reward(std::size_t t, double accuracy) {
  if (t == 0) throw Error(ErrorCode::InvalidArgument, "step index t starts at 1");
  return 1.0 - std::sqrt(static_cast<double>(t)) * (1.0 - accuracy);
}

RewardSample make_reward_sample(std::size_t t, double accuracy) {
  return {t, accuracy, scaled_reward(t, accuracy)};
}

RewardTable probe_reward_table(const ModelParams& init_model, std::span<const TaskSubset> tasks,
                               const BatchView& val, double inner_step, std::size_t num_classes) {
  RewardTable table{Matrix(tasks.size(), num_classes)};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Dataset& train = tasks[i].train();
    for (ClassId c = 0; c < num_classes; ++c) {
      const auto it = std::find(train.labels.begin(), train.labels.end(), c);
      if (it == train.labels.end()) {
        throw Error(ErrorCode::MissingClass,
                    "task " + std::to_string(i) + " has no example of class " + std::to_string(c));
      }
      const auto row = static_cast<std::size_t>(it - train.labels.begin());
      const ModelParams probed = inner_sgd_step(init_model, train.view(row, row + 1), inner_step);
      table.values(i, c) = scaled_reward(1, validation_accuracy(probed, val));
    }
  }
  return table;
}

std::vector<double> probe_first_batch(const ModelParams& init_model,
                                      std::span<const TaskSubset> tasks, const BatchView& val,
                                      double inner_step, std::size_t batch_size) {
  std::vector<double> rewards;
  rewards.reserve(tasks.size());
  for (const auto& task : tasks) {
    const Dataset& train = task.train();
    const std::size_t end = std::min(batch_size, train.size());
    const ModelParams probed = inner_sgd_step(init_model, train.view(0, end), inner_step);
    rewards.push_back(scaled_reward(1, validation_accuracy(probed, val)));
  }
  return rewards;
}

}  // namespace metasched
