#pragma once

#include <filesystem>
#include <string>

#include "metasched/gittins.hpp"
#include "metasched/learner.hpp"
#include "metasched/mdp.hpp"
#include "metasched/reward.hpp"

namespace metasched {

// JSON artifacts. Every document carries a "kind" field; readers reject
// documents of another kind with ParseError. Reals are written in shortest
// round-trip form, so write -> read reproduces values exactly.

std::string reward_table_to_json(const RewardTable& table);
RewardTable reward_table_from_json(const std::string& text);

std::string gittins_to_json(const GittinsTable& table);
GittinsTable gittins_from_json(const std::string& text);

/// Stores gamma, state_dims and values. The transition and reward tables are
/// rebuilt from the task chains, so only the solved values travel.
std::string mdp_values_to_json(const MdpPolicy& policy);
struct MdpValues {
  double gamma = 0.9;
  std::vector<std::size_t> state_dims;
  Vector values;
};
MdpValues mdp_values_from_json(const std::string& text);

std::string model_to_json(const ModelParams& model);
ModelParams model_from_json(const std::string& text);

std::string hyperparams_to_json(const Hyperparams& lambda);
Hyperparams hyperparams_from_json(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace metasched
