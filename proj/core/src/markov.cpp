#include "metasched/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metasched/error.hpp"
#include "metasched/random.hpp"

namespace metasched {

namespace {

constexpr double kStochasticTolerance = 1e-9;

void require_stochastic(const Matrix& p) {
  if (!is_row_stochastic(p, kStochasticTolerance)) {
    throw Error(ErrorCode::NotStochastic, "transition matrix rows must be non-negative and sum to 1");
  }
}

std::vector<bool> reachable_from(const Matrix& p, std::size_t start, bool reverse) {
  const std::size_t n = p.rows();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t s = stack.back();
    stack.pop_back();
    for (std::size_t t = 0; t < n; ++t) {
      const double w = reverse ? p(t, s) : p(s, t);
      if (w > 0.0 && !seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

}  // namespace

TransitionEstimate estimate_from_counts(std::size_t num_classes,
                                        std::vector<std::uint64_t> counts) {
  if (counts.size() != num_classes * num_classes) {
    throw Error(ErrorCode::ShapeMismatch, "count table must be C x C");
  }
  TransitionEstimate est;
  est.counts = std::move(counts);
  est.row_totals.assign(num_classes, 0);
  est.unseen_rows.assign(num_classes, false);
  est.probs = Matrix(num_classes, num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::uint64_t total = 0;
    for (std::size_t d = 0; d < num_classes; ++d) total += est.counts[c * num_classes + d];
    est.row_totals[c] = total;
    if (total == 0) {
      est.unseen_rows[c] = true;
      for (std::size_t d = 0; d < num_classes; ++d) {
        est.probs(c, d) = 1.0 / static_cast<double>(num_classes);
      }
      continue;
    }
    for (std::size_t d = 0; d < num_classes; ++d) {
      est.probs(c, d) =
          static_cast<double>(est.counts[c * num_classes + d]) / static_cast<double>(total);
    }
  }
  return est;
}

TransitionEstimate estimate_transitions(const LabelSequence& seq) {
  if (seq.labels.size() < 2) {
    throw Error(ErrorCode::EmptySequence, "need at least two labels to count transitions");
  }
  const std::size_t c = seq.num_classes;
  for (ClassId label : seq.labels) {
    if (label >= c) {
      throw Error(ErrorCode::InvalidArgument,
                  "label " + std::to_string(label) + " outside [0, " + std::to_string(c) + ")");
    }
  }
  std::vector<std::uint64_t> counts(c * c, 0);
  for (std::size_t i = 0; i + 1 < seq.labels.size(); ++i) {
    ++counts[seq.labels[i] * c + seq.labels[i + 1]];
  }
  return estimate_from_counts(c, std::move(counts));
}

IndependenceTestResult chi_squared_independence(const TransitionEstimate& est) {
  const std::size_t c = est.num_classes();
  std::vector<double> row(c, 0.0);
  std::vector<double> col(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double n = static_cast<double>(est.count(i, j));
      row[i] += n;
      col[j] += n;
      total += n;
    }
  }
  if (total < 1.0) throw Error(ErrorCode::DegenerateTable, "no transitions counted");

  const auto active_rows = static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](double v) { return v > 0.0; }));
  const auto active_cols = static_cast<std::size_t>(std::count_if(col.begin(), col.end(), [](double v) { return v > 0.0; }));
  if (active_rows < 2 || active_cols < 2) {
    throw Error(ErrorCode::DegenerateTable, "independence test needs df >= 1");
  }

  IndependenceTestResult result;
  result.df = (active_rows - 1) * (active_cols - 1);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row[i] * col[j] / total;
      if (expected <= 0.0) continue;
      const double diff = static_cast<double>(est.count(i, j)) - expected;
      result.statistic += diff * diff / expected;
    }
  }
  result.p_value = chi_squared_sf(result.statistic, result.df);
  result.reject_at_05 = result.p_value <= 0.05;
  return result;
}

LabelSequence generate_markov_stream(const Matrix& transitions, ClassId init, std::size_t length,
                                     std::uint64_t seed) {
  require_stochastic(transitions);
  const std::size_t c = transitions.rows();
  if (init >= c) throw Error(ErrorCode::InvalidArgument, "initial label outside the state space");

  LabelSequence seq{{}, c};
  if (length == 0) return seq;
  seq.labels.reserve(length);
  seq.labels.push_back(init);
  Rng rng(seed);
  while (seq.labels.size() < length) {
    const auto row = transitions.row(seq.labels.back());
    const double u = rng.uniform();
    double cumulative = 0.0;
    ClassId next = c;
    ClassId last_positive = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (row[j] <= 0.0) continue;
      last_positive = j;
      cumulative += row[j];
      if (u < cumulative) {
        next = j;
        break;
      }
    }
    // Rounding can leave the cumulative sum a hair under 1.
    seq.labels.push_back(next == c ? last_positive : next);
  }
  return seq;
}

Vector stationary_distribution(const Matrix& transitions) {
  require_stochastic(transitions);
  const std::size_t n = transitions.rows();
  const auto forward = reachable_from(transitions, 0, false);
  const auto backward = reachable_from(transitions, 0, true);
  for (std::size_t s = 0; s < n; ++s) {
    if (!forward[s] || !backward[s]) {
      throw Error(ErrorCode::Reducible, "state " + std::to_string(s) + " is not mutually reachable");
    }
  }

  constexpr std::size_t kMaxSteps = 100000;
  constexpr double kResidual = 1e-10;
  Vector pi(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (std::size_t step = 0; step < kMaxSteps; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * transitions(i, j);
    }
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(next[j] - pi[j]));
    if (residual <= kResidual) {
      double sum = 0.0;
      for (double v : next) sum += v;
      for (double& v : next) v /= sum;
      return next;
    }
    for (std::size_t j = 0; j < n; ++j) pi[j] = 0.5 * (pi[j] + next[j]);
  }
  throw Error(ErrorCode::NoConvergence, "power iteration did not reach the residual bound");
}

}  // namespace metasched
