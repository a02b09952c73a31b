#include "metasched/regret.hpp"

#include "metasched/error.hpp"

namespace metasched {

Vector regret_trace(std::span<const double> rewards, double best_arm_mean) {
  if (rewards.empty()) throw Error(ErrorCode::EmptyInput, "empty reward log");
  Vector out(rewards.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    sum += rewards[t];
    out[t] = static_cast<double>(t + 1) * best_arm_mean - sum;
  }
  return out;
}

}  // namespace metasched
