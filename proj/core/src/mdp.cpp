#include "metasched/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metasched/error.hpp"

namespace metasched {

namespace {

// Column j = (s, a) of the dual constraint matrix: e_s - gamma * P^a(s, .)^T.
class DualColumns {
 public:
  explicit DualColumns(const MdpPolicy& mdp)
      : mdp_(mdp), states_(mdp.num_states()), actions_(mdp.num_actions()) {}

  std::size_t count() const noexcept { return states_ * actions_; }
  std::size_t state(std::size_t j) const noexcept { return j / actions_; }
  std::size_t action(std::size_t j) const noexcept { return j % actions_; }
  double cost(std::size_t j) const noexcept { return mdp_.rewards(state(j), action(j)); }

  void fill(std::size_t j, std::span<double> out) const {
    const auto row = mdp_.transitions[action(j)].row(state(j));
    for (std::size_t i = 0; i < states_; ++i) out[i] = -mdp_.gamma * row[i];
    out[state(j)] += 1.0;
  }

  /// c_j - A_j^T y, i.e. Q(s, a) - y(s) when y plays the role of V.
  double reduced_cost(std::size_t j, std::span<const double> y) const {
    return q_value(mdp_, y, state(j), action(j)) - y[state(j)];
  }

 private:
  const MdpPolicy& mdp_;
  std::size_t states_;
  std::size_t actions_;
};

class RevisedSimplex {
 public:
  explicit RevisedSimplex(const MdpPolicy& mdp)
      : cols_(mdp), m_(mdp.num_states()), is_basic_(cols_.count(), false) {
    // Basis of the policy "always take action 0": one column per state.
    basic_.resize(m_);
    for (std::size_t s = 0; s < m_; ++s) {
      basic_[s] = s * mdp.num_actions();
      is_basic_[basic_[s]] = true;
    }
    double scale = 1.0;
    for (double r : mdp.rewards.entries()) scale = std::max(scale, std::abs(r));
    tolerance_ = 1e-11 * scale;
  }

  Vector solve() {
    const std::size_t max_iterations = 200 * cols_.count() + 1000;
    refactor();
    std::size_t since_refactor = 0;
    Vector column(m_);
    Vector u(m_);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      if (since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
      const Vector y = prices();
      std::size_t entering = cols_.count();
      double best = tolerance_;
      for (std::size_t j = 0; j < cols_.count(); ++j) {
        if (is_basic_[j]) continue;
        const double d = cols_.reduced_cost(j, y);
        if (d > best) {
          best = d;
          entering = j;
        }
      }
      if (entering == cols_.count()) {
        if (since_refactor == 0) return y;
        // Confirm optimality against a freshly factored basis.
        refactor();
        since_refactor = 0;
        continue;
      }

      cols_.fill(entering, column);
      for (std::size_t k = 0; k < m_; ++k) u[k] = dot(basis_inverse_.row(k), column);

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m_; ++k) {
        if (u[k] <= 1e-12) continue;
        const double ratio = x_basic_[k] / u[k];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basic_[k] < basic_[leave])) {
          best_ratio = ratio;
          leave = k;
        }
      }
      if (leave == m_) throw Error(ErrorCode::NoConvergence, "LP dual is unbounded");
      pivot(leave, entering, u);
      ++since_refactor;
    }
    throw Error(ErrorCode::NoConvergence, "simplex iteration limit reached");
  }

 private:
  static constexpr std::size_t kRefactorEvery = 32;

  void refactor() {
    Matrix basis(m_, m_);
    Vector column(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      cols_.fill(basic_[k], column);
      for (std::size_t i = 0; i < m_; ++i) basis(i, k) = column[i];
    }
    basis_inverse_ = inverse(basis);
    x_basic_.assign(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const auto row = basis_inverse_.row(k);
      for (double v : row) x_basic_[k] += v;  // B^-1 * 1
    }
  }

  // y = B^-T c_B
  Vector prices() const {
    Vector y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double c = cols_.cost(basic_[k]);
      const auto row = basis_inverse_.row(k);
      for (std::size_t i = 0; i < m_; ++i) y[i] += row[i] * c;
    }
    return y;
  }

  void pivot(std::size_t leave, std::size_t entering, std::span<const double> u) {
    const double pivot_value = u[leave];
    auto pivot_row = basis_inverse_.row(leave);
    for (double& v : pivot_row) v /= pivot_value;
    x_basic_[leave] /= pivot_value;
    for (std::size_t k = 0; k < m_; ++k) {
      if (k == leave || u[k] == 0.0) continue;
      auto row = basis_inverse_.row(k);
      for (std::size_t i = 0; i < m_; ++i) row[i] -= u[k] * pivot_row[i];
      x_basic_[k] -= u[k] * x_basic_[leave];
    }
    is_basic_[basic_[leave]] = false;
    is_basic_[entering] = true;
    basic_[leave] = entering;
  }

  DualColumns cols_;
  std::size_t m_;
  std::vector<std::size_t> basic_;
  std::vector<bool> is_basic_;
  Matrix basis_inverse_;
  Vector x_basic_;
  double tolerance_ = 1e-11;
};

}  // namespace

MdpPolicy make_mdp(Matrix rewards, std::vector<Matrix> transitions, double gamma,
                   std::vector<std::size_t> state_dims) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
  if (transitions.empty()) throw Error(ErrorCode::EmptyInput, "MDP needs at least one action");
  if (rewards.cols() != transitions.size()) {
    throw Error(ErrorCode::ShapeMismatch, "reward table needs one column per action");
  }
  for (const auto& p : transitions) {
    if (p.rows() != rewards.rows()) throw Error(ErrorCode::ShapeMismatch, "transition size != |S|");
    if (!is_row_stochastic(p, 1e-9)) {
      throw Error(ErrorCode::NotStochastic, "action transition matrix is not row-stochastic");
    }
  }
  if (state_dims.empty()) state_dims = {rewards.rows()};
  std::size_t product = 1;
  for (std::size_t d : state_dims) product *= d;
  if (product != rewards.rows()) throw Error(ErrorCode::ShapeMismatch, "state_dims product != |S|");
  return {gamma, std::move(state_dims), std::move(rewards), std::move(transitions), {}};
}

MdpPolicy mdp_build(std::span<const Matrix> task_transitions, const RewardTable& rewards,
                    double gamma, std::size_t max_states) {
  const std::size_t n = task_transitions.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "MDP needs at least one task");
  if (rewards.num_tasks() != n) throw Error(ErrorCode::ShapeMismatch, "reward table rows != tasks");
  std::vector<std::size_t> dims;
  std::size_t states = 1;
  for (const auto& p : task_transitions) {
    if (!is_row_stochastic(p, 1e-9)) {
      throw Error(ErrorCode::NotStochastic, "task transition matrix is not row-stochastic");
    }
    if (p.rows() > rewards.num_classes()) {
      throw Error(ErrorCode::ShapeMismatch, "task has more classes than the reward table");
    }
    dims.push_back(p.rows());
    if (states > max_states / p.rows()) {
      throw Error(ErrorCode::StateSpaceTooLarge,
                  "product state space exceeds " + std::to_string(max_states) + " states");
    }
    states *= p.rows();
  }

  std::vector<Matrix> actions;
  actions.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    Matrix agg = Matrix::identity(1);
    for (std::size_t slot = 0; slot < n; ++slot) {
      agg = kron(agg, slot == a ? task_transitions[slot] : Matrix::identity(dims[slot]),
                 max_states * max_states);
    }
    actions.push_back(std::move(agg));
  }

  Matrix r(states, n);
  for (std::size_t s = 0; s < states; ++s) {
    const auto labels = decode_state(dims, s);
    for (std::size_t a = 0; a < n; ++a) r(s, a) = rewards(a, labels[a]);
  }
  return make_mdp(std::move(r), std::move(actions), gamma, std::move(dims));
}

std::size_t encode_state(std::span<const std::size_t> dims, std::span<const ClassId> labels) {
  if (dims.size() != labels.size()) throw Error(ErrorCode::ShapeMismatch, "one label per task");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (labels[i] >= dims[i]) throw Error(ErrorCode::InvalidArgument, "label outside its task");
    index = index * dims[i] + labels[i];
  }
  return index;
}

std::vector<ClassId> decode_state(std::span<const std::size_t> dims, std::size_t index) {
  std::vector<ClassId> labels(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    labels[i] = index % dims[i];
    index /= dims[i];
  }
  return labels;
}

double q_value(const MdpPolicy& mdp, std::span<const double> values, std::size_t state,
               std::size_t action) {
  return mdp.rewards(state, action) + mdp.gamma * dot(mdp.transitions[action].row(state), values);
}

Vector mdp_solve_lp(const MdpPolicy& mdp) { return RevisedSimplex(mdp).solve(); }

Vector mdp_value_iteration(const MdpPolicy& mdp, double tol) {
  const std::size_t s_count = mdp.num_states();
  const double stop = tol * (1.0 - mdp.gamma) / (2.0 * mdp.gamma);
  Vector v(s_count, 0.0);
  Vector next(s_count);
  while (true) {
    double change = 0.0;
    for (std::size_t s = 0; s < s_count; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp.num_actions(); ++a) best = std::max(best, q_value(mdp, v, s, a));
      next[s] = best;
      change = std::max(change, std::abs(best - v[s]));
    }
    v.swap(next);
    if (change <= stop) return v;
  }
}

double bellman_residual(const MdpPolicy& mdp, std::span<const double> values) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) best = std::max(best, q_value(mdp, values, s, a));
    worst = std::max(worst, std::abs(values[s] - best));
  }
  return worst;
}

double lp_max_violation(const MdpPolicy& mdp, std::span<const double> values) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      worst = std::max(worst, q_value(mdp, values, s, a) - values[s]);
    }
  }
  return worst;
}

std::size_t mdp_select(const MdpPolicy& mdp, std::span<const ClassId> state_labels,
                       std::span<const bool> available) {
  if (!mdp.solved()) throw Error(ErrorCode::InvalidArgument, "MDP policy has no solved values");
  const std::size_t s = encode_state(mdp.state_dims, state_labels);
  std::size_t best = mdp.num_actions();
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
    if (!available.empty() && !available[a]) continue;
    const double q = q_value(mdp, mdp.values, s, a);
    if (best == mdp.num_actions() || q > best_q) {
      best = a;
      best_q = q;
    }
  }
  if (best == mdp.num_actions()) throw Error(ErrorCode::AllExhausted, "no MDP action is available");
  return best;
}

}  // namespace metasched
