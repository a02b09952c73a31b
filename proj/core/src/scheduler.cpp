#include "metasched/scheduler.hpp"

#include <array>
#include <utility>
#include <vector>

#include "metasched/error.hpp"

namespace metasched {

namespace {

constexpr std::array<std::pair<SchedulerKind, std::string_view>, 5> kNames{{
    {SchedulerKind::Cyclic, "cyclic"},
    {SchedulerKind::Random, "random"},
    {SchedulerKind::Ucb, "ucb"},
    {SchedulerKind::Gittins, "gittins"},
    {SchedulerKind::Mdp, "mdp"},
}};


// std::vector<bool> has no contiguous storage, so keep a plain array.
class Mask {
 public:
  explicit Mask(const SelectionContext& ctx)
      : size_(ctx.upcoming.size()), data_(std::make_unique<bool[]>(size_)) {
    for (std::size_t i = 0; i < size_; ++i) data_[i] = ctx.upcoming[i].has_value();
  }
  std::span<const bool> span() const { return {data_.get(), size_}; }

 private:
  std::size_t size_;
  std::unique_ptr<bool[]> data_;
};

class CyclicScheduler final : public Scheduler {
 public:
  explicit CyclicScheduler(std::size_t n) : state_{n, 0} {}
  SchedulerKind kind() const noexcept override { return SchedulerKind::Cyclic; }
  std::size_t select(const SelectionContext& ctx) override {
    const Mask mask(ctx);
    return cyclic_select(state_, mask.span());
  }

 private:
  CyclicState state_;
};

class RandomScheduler final : public Scheduler {
 public:
  RandomScheduler(std::size_t n, std::uint64_t seed) : n_(n), rng_(seed) {}
  SchedulerKind kind() const noexcept override { return SchedulerKind::Random; }
  std::size_t select(const SelectionContext& ctx) override {
    const Mask mask(ctx);
    return random_select(rng_, n_, mask.span());
  }

 private:
  std::size_t n_;
  Rng rng_;
};

class UcbScheduler final : public Scheduler {
 public:
  explicit UcbScheduler(UcbState s) : state_(std::move(s)) {}
  SchedulerKind kind() const noexcept override { return SchedulerKind::Ucb; }
  std::size_t select(const SelectionContext& ctx) override {
    const Mask mask(ctx);
    return ucb_select(state_, mask.span());
  }
  void observe(std::size_t task, double reward) override {
    state_ = ucb_update(std::move(state_), task, reward);
  }

 private:
  UcbState state_;
};

class GittinsScheduler final : public Scheduler {
 public:
  explicit GittinsScheduler(GittinsTable t) : table_(std::move(t)) {}
  SchedulerKind kind() const noexcept override { return SchedulerKind::Gittins; }
  std::size_t select(const SelectionContext& ctx) override {
    return gittins_select(table_, ctx.upcoming);
  }

 private:
  GittinsTable table_;
};

class MdpScheduler final : public Scheduler {
 public:
  explicit MdpScheduler(MdpPolicy p) : policy_(std::move(p)) {
    if (!policy_.solved()) throw Error(ErrorCode::InvalidArgument, "MDP policy has no values");
  }
  SchedulerKind kind() const noexcept override { return SchedulerKind::Mdp; }
  std::size_t select(const SelectionContext& ctx) override {
    const Mask mask(ctx);
    std::vector<ClassId> labels(ctx.upcoming.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (ctx.upcoming[i]) {
        labels[i] = *ctx.upcoming[i];
      } else if (i < ctx.last_labels.size()) {
        labels[i] = ctx.last_labels[i];
      } else {
        labels[i] = 0;
      }
    }
    return mdp_select(policy_, labels, mask.span());
  }

 private:
  MdpPolicy policy_;
};

}  // namespace

std::string_view to_string(SchedulerKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::unique_ptr<Scheduler> make_cyclic_scheduler(std::size_t num_tasks) {
  if (num_tasks == 0) throw Error(ErrorCode::InvalidArgument, "no tasks");
  return std::make_unique<CyclicScheduler>(num_tasks);
}

std::unique_ptr<Scheduler> make_random_scheduler(std::size_t num_tasks, std::uint64_t seed) {
  if (num_tasks == 0) throw Error(ErrorCode::InvalidArgument, "no tasks");
  return std::make_unique<RandomScheduler>(num_tasks, seed);
}

std::unique_ptr<Scheduler> make_ucb_scheduler(UcbState state) {
  return std::make_unique<UcbScheduler>(std::move(state));
}

std::unique_ptr<Scheduler> make_gittins_scheduler(GittinsTable table) {
  return std::make_unique<GittinsScheduler>(std::move(table));
}

std::unique_ptr<Scheduler> make_mdp_scheduler(MdpPolicy policy) {
  return std::make_unique<MdpScheduler>(std::move(policy));
}

}  // namespace metasched
