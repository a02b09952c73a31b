#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace metasched {

/// UCB over task subsets. Arms start with one visit each, seeded by a probe
/// reward, and the global step counter starts at N.
struct UcbState {
  std::vector<std::uint64_t> visits;
  std::vector<double> means;
  double bound = 2.0;        // U
  double exploration = 2.0;  // xi, must exceed 1
  std::uint64_t t = 0;

  std::size_t num_arms() const noexcept { return visits.size(); }
};

/// Throws BadExploration when exploration <= 1.
UcbState ucb_init(std::span<const double> probe_rewards, double bound = 2.0,
                  double exploration = 2.0);

/// mean + U * sqrt(xi * ln t / V) for one arm.
double ucb_score(const UcbState& state, std::size_t arm);

/// argmax of ucb_score with lowest-index ties. The masked overload skips
/// unavailable arms and throws AllExhausted when none remain.
std::size_t ucb_select(const UcbState& state);
std::size_t ucb_select(const UcbState& state, std::span<const bool> available);

UcbState ucb_update(UcbState state, std::size_t arm, double reward);

}  // namespace metasched
