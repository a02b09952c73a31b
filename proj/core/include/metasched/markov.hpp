#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metasched/numerics.hpp"

namespace metasched {

using ClassId = std::size_t;

struct LabelSequence {
  std::vector<ClassId> labels;
  std::size_t num_classes = 0;
};

/// Count-based first-order transition estimate over class labels.
struct TransitionEstimate {
  Matrix probs;                          // row-stochastic C x C
  std::vector<std::uint64_t> counts;     // C x C row-major jump counts
  std::vector<std::uint64_t> row_totals; // occurrences that have a successor
  std::vector<bool> unseen_rows;         // rows defaulted to uniform

  std::size_t num_classes() const noexcept { return row_totals.size(); }
  std::uint64_t count(std::size_t from, std::size_t to) const {
    return counts[from * num_classes() + to];
  }
};

struct IndependenceTestResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  bool reject_at_05 = false;
};

/// counts[c][c'] = number of adjacent pairs c -> c'. Each row is normalised by
/// the number of occurrences of c that have a successor; rows never left are
/// set to uniform. Throws EmptySequence for fewer than two labels.
TransitionEstimate estimate_transitions(const LabelSequence& seq);

/// Builds an estimate directly from a C x C count table (row-major).
TransitionEstimate estimate_from_counts(std::size_t num_classes,
                                        std::vector<std::uint64_t> counts);

/// Pearson independence test on the count contingency table. Cells with zero
/// expected count are skipped; df uses only rows/columns with non-zero margins.
IndependenceTestResult chi_squared_independence(const TransitionEstimate& est);

LabelSequence generate_markov_stream(const Matrix& transitions, ClassId init, std::size_t length,
                                     std::uint64_t seed);

/// Stationary distribution of an irreducible chain, by power iteration on the
/// lazy chain (I + P) / 2 so periodic chains converge too.
Vector stationary_distribution(const Matrix& transitions);

}  // namespace metasched
