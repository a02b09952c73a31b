#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "metasched/baselines.hpp"
#include "metasched/gittins.hpp"
#include "metasched/mdp.hpp"
#include "metasched/ucb.hpp"

namespace metasched {

enum class SchedulerKind { Cyclic, Random, Ucb, Gittins, Mdp };

std::string_view to_string(SchedulerKind kind) noexcept;
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name) noexcept;

/// What a scheduler sees before each inner step.
struct SelectionContext {
  /// Next unread label per task; nullopt once the task is exhausted.
  std::span<const std::optional<ClassId>> upcoming;
  /// Label used for exhausted tasks when a joint state must be encoded.
  std::span<const ClassId> last_labels;
};

/// Common face of the task-selection policies. Instances are owned by a single
/// run and mutated sequentially.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual SchedulerKind kind() const noexcept = 0;
  /// Throws AllExhausted when no task has samples left.
  virtual std::size_t select(const SelectionContext& ctx) = 0;
  virtual void observe(std::size_t /*task*/, double /*reward*/) {}
};

std::unique_ptr<Scheduler> make_cyclic_scheduler(std::size_t num_tasks);
std::unique_ptr<Scheduler> make_random_scheduler(std::size_t num_tasks, std::uint64_t seed);
std::unique_ptr<Scheduler> make_ucb_scheduler(UcbState state);
std::unique_ptr<Scheduler> make_gittins_scheduler(GittinsTable table);
/// The policy must already carry solved values.
std::unique_ptr<Scheduler> make_mdp_scheduler(MdpPolicy policy);

}  // namespace metasched
