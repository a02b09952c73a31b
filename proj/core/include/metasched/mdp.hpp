#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "metasched/markov.hpp"
#include "metasched/numerics.hpp"
#include "metasched/reward.hpp"

namespace metasched {

inline constexpr std::size_t kDefaultMaxStates = 4096;

/// Tabular discounted MDP. States are enumerated row-major over state_dims
/// (first dimension most significant); action a moves by transitions[a].
struct MdpPolicy {
  double gamma = 0.9;
  std::vector<std::size_t> state_dims;
  Matrix rewards;                   // |S| x |A|, rewards(s, a) = r(s, a)
  std::vector<Matrix> transitions;  // one |S| x |S| row-stochastic matrix per action
  Vector values;                    // empty until solved

  std::size_t num_states() const noexcept { return rewards.rows(); }
  std::size_t num_actions() const noexcept { return transitions.size(); }
  bool solved() const noexcept { return values.size() == num_states(); }
};

/// Validates shapes, stochasticity and gamma. state_dims defaults to {|S|}.
MdpPolicy make_mdp(Matrix rewards, std::vector<Matrix> transitions, double gamma,
                   std::vector<std::size_t> state_dims = {});

/// Product-space MDP over the tasks' label chains: action i advances task i by
/// its own chain and leaves every other task's label fixed, i.e.
/// I (x) ... (x) P^i (x) ... (x) I with P^i in slot i. r(s, i) = rewards(i, s_i).
MdpPolicy mdp_build(std::span<const Matrix> task_transitions, const RewardTable& rewards,
                    double gamma, std::size_t max_states = kDefaultMaxStates);

std::size_t encode_state(std::span<const std::size_t> dims, std::span<const ClassId> labels);
std::vector<ClassId> decode_state(std::span<const std::size_t> dims, std::size_t index);

/// r(s, a) + gamma * sum_s' P^a(s, s') V(s').
double q_value(const MdpPolicy& mdp, std::span<const double> values, std::size_t state,
               std::size_t action);

/// Optimal values from the LP  min sum_s V(s)  s.t.  V(s) >= r(s,a) + gamma P^a(s,.) V.
/// Solved as its dual (occupancy measures) by dense revised simplex, starting
/// from the basis of an arbitrary deterministic policy; V is the dual price
/// vector at optimality.
Vector mdp_solve_lp(const MdpPolicy& mdp);

/// Bellman iteration until the sup-norm step is <= tol (1 - gamma) / (2 gamma),
/// which bounds the error to the fixed point by tol.
Vector mdp_value_iteration(const MdpPolicy& mdp, double tol);

/// max_s |V(s) - max_a Q(s, a)|.
double bellman_residual(const MdpPolicy& mdp, std::span<const double> values);

/// Largest violation of the LP inequalities, max(0, Q(s, a) - V(s)).
double lp_max_violation(const MdpPolicy& mdp, std::span<const double> values);

/// Greedy action at the encoded state among available actions, lowest index
/// on ties. Throws AllExhausted when no action is available.
std::size_t mdp_select(const MdpPolicy& mdp, std::span<const ClassId> state_labels,
                       std::span<const bool> available = {});

}  // namespace metasched
