#include "metasched/ucb.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "metasched/error.hpp"

namespace metasched {

UcbState ucb_init(std::span<const double> probe_rewards, double bound, double exploration) {
  if (!(exploration > 1.0)) {
    throw Error(ErrorCode::BadExploration, "exploration factor must exceed 1");
  }
  if (probe_rewards.empty()) throw Error(ErrorCode::EmptyInput, "UCB needs at least one arm");
  UcbState s;
  s.visits.assign(probe_rewards.size(), 1);
  s.means.assign(probe_rewards.begin(), probe_rewards.end());
  s.bound = bound;
  s.exploration = exploration;
  s.t = probe_rewards.size();
  return s;
}

double ucb_score(const UcbState& state, std::size_t arm) {
  const double log_t = std::log(static_cast<double>(state.t));
  return state.means[arm] +
         state.bound * std::sqrt(state.exploration * log_t / static_cast<double>(state.visits[arm]));
}

std::size_t ucb_select(const UcbState& state, std::span<const bool> available) {
  std::size_t best = state.num_arms();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t arm = 0; arm < state.num_arms(); ++arm) {
    if (!available.empty() && !available[arm]) continue;
    const double score = ucb_score(state, arm);
    if (best == state.num_arms() || score > best_score) {
      best = arm;
      best_score = score;
    }
  }
  if (best == state.num_arms()) throw Error(ErrorCode::AllExhausted, "no UCB arm is available");
  return best;
}

std::size_t ucb_select(const UcbState& state) { return ucb_select(state, {}); }

UcbState ucb_update(UcbState state, std::size_t arm, double reward) {
  if (arm >= state.num_arms()) {
    throw Error(ErrorCode::InvalidArgument, "arm " + std::to_string(arm) + " out of range");
  }
  const auto v = ++state.visits[arm];
  state.means[arm] += (reward - state.means[arm]) / static_cast<double>(v);
  ++state.t;
  return state;
}

}  // namespace metasched
