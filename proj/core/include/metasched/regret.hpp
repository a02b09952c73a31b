#pragma once

#include <span>

#include "metasched/numerics.hpp"

namespace metasched {

/// Cumulative regret R_T = T * best_mean - sum_{t <= T} r_t for every prefix.
Vector regret_trace(std::span<const double> rewards, double best_arm_mean);

}  // namespace metasched
