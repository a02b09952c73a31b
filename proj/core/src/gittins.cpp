#include "metasched/gittins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metasched/error.hpp"

namespace metasched {

GittinsIndices gittins_compute(const Matrix& transitions, std::span<const double> rewards,
                               double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1)");
  if (!is_row_stochastic(transitions, 1e-9)) {
    throw Error(ErrorCode::NotStochastic, "Gittins transition matrix is not row-stochastic");
  }
  const std::size_t n = transitions.rows();
  if (rewards.size() != n) throw Error(ErrorCode::ShapeMismatch, "one reward per state required");

  GittinsIndices out;
  out.indices.assign(n, 0.0);
  std::vector<bool> ranked(n, false);

  const ClassId top = argmax_tiebreak(rewards);
  out.indices[top] = rewards[top];
  out.ordering.push_back(top);
  ranked[top] = true;

  const Vector ones(n, 1.0);
  while (out.ordering.size() < n) {
    // I - beta * Q, with Q = P restricted to columns in the continuation set.
    Matrix system = Matrix::identity(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (ranked[b]) system(a, b) -= beta * transitions(a, b);
      }
    }
    Vector d;
    Vector b;
    try {
      d = linear_solve(system, rewards);
      b = linear_solve(system, ones);
    } catch (const Error& e) {
      // I - beta Q is strictly diagonally dominant for beta < 1.
      throw Error(ErrorCode::SingularMatrix, std::string("internal: ") + e.what());
    }
    ClassId best = n;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (ClassId a = 0; a < n; ++a) {
      if (ranked[a]) continue;
      const double ratio = d[a] / b[a];
      if (best == n || ratio > best_ratio) {
        best = a;
        best_ratio = ratio;
      }
    }
    out.indices[best] = best_ratio;
    out.ordering.push_back(best);
    ranked[best] = true;
  }
  return out;
}

GittinsTable gittins_tables(std::span<const Matrix> transitions, const RewardTable& rewards,
                            double beta) {
  if (transitions.size() != rewards.num_tasks()) {
    throw Error(ErrorCode::ShapeMismatch, "one transition matrix per task required");
  }
  GittinsTable table;
  table.beta = beta;
  table.indices = Matrix(rewards.num_tasks(), rewards.num_classes());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto row = rewards.values.row(i);
    auto result = gittins_compute(transitions[i], row, beta);
    for (std::size_t c = 0; c < result.indices.size(); ++c) table.indices(i, c) = result.indices[c];
    table.orderings.push_back(std::move(result.ordering));
  }
  return table;
}

std::size_t gittins_select(const GittinsTable& table,
                           std::span<const std::optional<ClassId>> upcoming) {
  if (upcoming.size() != table.num_tasks()) {
    throw Error(ErrorCode::ShapeMismatch, "one upcoming label per task required");
  }
  std::size_t best = table.num_tasks();
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < upcoming.size(); ++i) {
    if (!upcoming[i]) continue;
    if (*upcoming[i] >= table.indices.cols()) {
      throw Error(ErrorCode::InvalidArgument, "upcoming label outside task " + std::to_string(i));
    }
    const double v = table.indices(i, *upcoming[i]);
    if (best == table.num_tasks() || v > best_index) {
      best = i;
      best_index = v;
    }
  }
  if (best == table.num_tasks()) throw Error(ErrorCode::AllExhausted, "every task is exhausted");
  return best;
}

}  // namespace metasched
