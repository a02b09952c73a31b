// metasched command-line entry point.
//
//   metasched run          --config PATH [--seed N] [--out DIR]
//   metasched compare      --config PATH [--out DIR]
//   metasched probe        --config PATH [--seed N] [--out DIR]
//   metasched precompute   --config PATH [--seed N] [--out DIR]
//   metasched stationarity --metrics PATH [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "metasched/artifacts.hpp"
#include "metasched/config.hpp"
#include "metasched/error.hpp"
#include "metasched/experiment.hpp"
#include "metasched/logging.hpp"
#include "metasched/stationarity.hpp"

namespace fs = std::filesystem;
using namespace metasched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingKey:
    case ErrorCode::BadValue:
    case ErrorCode::BadExploration:
    case ErrorCode::BaselineMissing:
      return kExitConfig;
    case ErrorCode::ParseError:
    case ErrorCode::UnknownLabel:
    case ErrorCode::RaggedRow:
    case ErrorCode::BadMagic:
    case ErrorCode::CountMismatch:
    case ErrorCode::Truncated:
    case ErrorCode::EmptyTask:
    case ErrorCode::Io:
    case ErrorCode::MissingClass:
    case ErrorCode::EmptyValidationSet:
    case ErrorCode::TooFewSteps:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string metrics;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig config = load_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (!o.out.empty()) config.output_dir = o.out;
  return config;
}

int cmd_run(const Options& o) {
  const ExperimentConfig config = load(o);
  const auto result = run_experiment_to_dir(config, config.output_dir);
  const auto& s = result.summary;
  fmt::print("scheduler {} seed {}: {} steps, {} samples, final accuracy {:.4f}, samples to target {}\n",
             to_string(s.scheduler), s.seed, s.total_steps, s.total_samples, s.final_accuracy,
             s.samples_to_target ? std::to_string(*s.samples_to_target) : std::string("not reached"));
  fmt::print("wrote {}\n", (fs::path(config.output_dir) / "metrics.csv").string());
  return kExitOk;
}

int cmd_compare(const Options& o) {
  const ExperimentConfig config = load(o);
  auto kinds = config.compare.schedulers;
  if (kinds.empty()) kinds = {SchedulerKind::Cyclic, SchedulerKind::Random, SchedulerKind::Ucb,
                              SchedulerKind::Gittins, SchedulerKind::Mdp};
  auto seeds = config.compare.seeds;
  if (seeds.empty()) seeds = {config.seed};
  const auto table = compare_schedulers(config, kinds, seeds);
  const fs::path dir = config.output_dir;
  write_text_file(dir / "efficiency.csv", efficiency_csv(table));
  const std::string text = efficiency_text(table);
  write_text_file(dir / "efficiency.txt", text);
  std::fputs(text.c_str(), stdout);
  return kExitOk;
}

int cmd_probe(const Options& o) {
  const ExperimentConfig config = load(o);
  const ExperimentData data = load_experiment_data(config);
  const Hyperparams lambda = initial_hyperparams(config, data);
  const RewardTable table = probe_reward_table(lambda.init_params, data.split.tasks, data.split.pooled_val.view(),
                                               lambda.inner_step(), data.num_classes);
  const std::string json = reward_table_to_json(table) + "\n";
  write_text_file(fs::path(config.output_dir) / "reward_table.json", json);
  std::fputs(json.c_str(), stdout);
  return kExitOk;
}

int cmd_precompute(const Options& o) {
  ExperimentConfig config = load(o);
  const ExperimentData data = load_experiment_data(config);
  const Hyperparams lambda = initial_hyperparams(config, data);
  const fs::path dir = config.output_dir;

  config.scheduler = SchedulerKind::Gittins;
  const auto gittins = precompute_artifacts(config, data, lambda);
  write_text_file(dir / "reward_table.json", reward_table_to_json(*gittins.rewards) + "\n");
  write_text_file(dir / "gittins.json", gittins_to_json(*gittins.gittins) + "\n");
  fmt::print("wrote {}\n", (dir / "gittins.json").string());

  config.scheduler = SchedulerKind::Mdp;
  try {
    const auto mdp = precompute_artifacts(config, data, lambda);
    write_text_file(dir / "mdp.json", mdp_values_to_json(*mdp.mdp) + "\n");
    fmt::print("wrote {}\n", (dir / "mdp.json").string());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StateSpaceTooLarge) throw;
    log_warn("skipping MDP values: {}", e.what());
  }
  return kExitOk;
}

int cmd_stationarity(const Options& o) {
  const auto metrics = read_metrics_csv(o.metrics);
  const auto report = stationarity_report(metrics);
  const fs::path dir = o.out.empty() ? fs::path(o.metrics).parent_path() : fs::path(o.out);
  write_text_file(dir / "stationarity_series.csv", stationarity_series_csv(report));
  write_text_file(dir / "stationarity_windows.csv", stationarity_windows_csv(report));
  const std::string summary = stationarity_summary_csv(report);
  write_text_file(dir / "stationarity_summary.csv", summary);
  std::fputs(summary.c_str(), stdout);
  fmt::print("{} of {} assessed series have cv <= {}\n", report.stationary_count(), report.assessed_count(),
             report.options.cv_threshold);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Active meta-learning scheduler engine and experiment harness"};
  app.require_subcommand(1);

  Options o;
  std::uint64_t seed = 0;
  auto add_config = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", o.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    if (with_seed) sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
  };
  auto* run = app.add_subcommand("run", "Run one experiment");
  add_config(run, true);
  auto* compare = app.add_subcommand("compare", "Sample-efficiency sweep over schedulers and seeds");
  add_config(compare, false);
  auto* probe = app.add_subcommand("probe", "Emit the probe reward table");
  add_config(probe, true);
  auto* precompute = app.add_subcommand("precompute", "Emit Gittins and MDP artifacts");
  add_config(precompute, true);
  auto* stationarity = app.add_subcommand("stationarity", "sqrt(t) * e_t report from a metrics file");
  stationarity->add_option("--metrics", o.metrics, "metrics.csv from a run")->required()->check(CLI::ExistingFile);
  stationarity->add_option("--out", o.out, "Output directory (default: next to the metrics file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {run, probe, precompute}) {
    if (sub->parsed() && sub->count("--seed") > 0) o.seed = seed;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (compare->parsed()) return cmd_compare(o);
    if (probe->parsed()) return cmd_probe(o);
    if (precompute->parsed()) return cmd_precompute(o);
    if (stationarity->parsed()) return cmd_stationarity(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
