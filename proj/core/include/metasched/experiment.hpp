#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasched/config.hpp"
#include "metasched/data.hpp"
#include "metasched/gittins.hpp"
#include "metasched/mdp.hpp"
#include "metasched/reward.hpp"
#include "metasched/scheduler.hpp"
#include "metasched/training.hpp"

namespace metasched {

// ---------------------------------------------------------------- metrics file

/// Frozen column order of metrics.csv.
inline constexpr std::string_view kMetricsHeader =
    "k,t,task,class,accuracy,reward,sqrt_t_error,samples";

std::string format_metrics_row(const MetricsRecord& record);
std::vector<MetricsRecord> parse_metrics_csv(std::string_view text);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------- setup

struct ExperimentData {
  TaskSplit split;
  /// Per-task transition matrices estimated from the training label order.
  std::vector<Matrix> transitions;
  std::size_t num_classes = 0;
  std::size_t dim = 0;
};

/// Zero-centred class means of norm `separation`: a regular simplex when
/// dim >= classes, points on a circle in the first two coordinates otherwise,
/// evenly spaced on a line when dim == 1.
std::vector<Vector> synthetic_class_means(std::size_t classes, std::size_t dim, double separation);

/// Synthetic benchmark layout: means from synthetic_class_means, every class
/// of task i has std noise[i], and P^i has diag[i] on the diagonal with the
/// rest spread evenly.
SyntheticSpec synthetic_spec(const ExperimentConfig& config);
ExperimentData load_experiment_data(const ExperimentConfig& config);
Hyperparams initial_hyperparams(const ExperimentConfig& config, const ExperimentData& data);

/// Everything computed before training starts.
struct SchedulerArtifacts {
  std::optional<RewardTable> rewards;          // gittins, mdp
  std::optional<std::vector<double>> ucb_probe;
  std::optional<GittinsTable> gittins;
  std::optional<MdpPolicy> mdp;                // solved
};

SchedulerArtifacts precompute_artifacts(const ExperimentConfig& config, const ExperimentData& data,
                                        const Hyperparams& lambda);
std::unique_ptr<Scheduler> build_scheduler(const ExperimentConfig& config, const ExperimentData& data,
                                           const SchedulerArtifacts& artifacts);

// ---------------------------------------------------------------- runs

struct RunSummary {
  SchedulerKind scheduler = SchedulerKind::Cyclic;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> samples_to_target;
  double target_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::uint64_t total_samples = 0;
  std::size_t total_steps = 0;
  std::size_t epochs = 0;
  std::vector<std::string> notes;
};

/// Deterministic content only; wall time lives in timing.json.
std::string summary_to_json(const RunSummary& summary);

struct ExperimentResult {
  RunSummary summary;
  TrainingResult training;
  SchedulerArtifacts artifacts;
  double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const MetricsSink& sink = {});

/// Writes metrics.csv, summary.json, timing.json, hyperparams.json and the
/// scheduler artifacts under dir. On failure the metrics written so far stay
/// on disk next to an error.txt, and the error is rethrown.
ExperimentResult run_experiment_to_dir(const ExperimentConfig& config, const std::filesystem::path& dir);

// ---------------------------------------------------------------- comparison

struct EfficiencyRow {
  SchedulerKind kind = SchedulerKind::Cyclic;
  bool ran = true;
  std::string not_run_reason;
  std::vector<std::optional<std::uint64_t>> samples;  // per seed
  double median = 0.0;        // +inf when the median run never hits the target
  double ratio = 0.0;         // baseline median / median; 0 if never reached, +inf if only the baseline fails
  double win_fraction = 0.0;  // seeds where this scheduler needs strictly fewer samples than cyclic
};

struct EfficiencyTable {
  std::vector<std::uint64_t> seeds;
  std::vector<EfficiencyRow> rows;  // canonical scheduler order
  const EfficiencyRow* find(SchedulerKind kind) const noexcept;
};

double median_samples(std::span<const std::optional<std::uint64_t>> samples);
double efficiency_ratio(double baseline_median, double median);

/// Runs every (scheduler, seed) pair. Throws BaselineMissing unless cyclic is
/// listed. Row order does not depend on the order of `schedulers`.
EfficiencyTable compare_schedulers(const ExperimentConfig& config, std::span<const SchedulerKind> schedulers,
                                   std::span<const std::uint64_t> seeds);

/// scheduler,median_samples,ratio,win_fraction,seeds_reached
std::string efficiency_csv(const EfficiencyTable& table);
std::string efficiency_text(const EfficiencyTable& table);

}  // namespace metasched
