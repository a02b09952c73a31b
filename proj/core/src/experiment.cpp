#include "metasched/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "metasched/artifacts.hpp"
#include "metasched/error.hpp"
#include "metasched/logging.hpp"
#include "metasched/markov.hpp"
#include "metasched/ucb.hpp"

namespace metasched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sub-seed streams; fixed so that outputs stay stable across releases.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kRandomSchedulerStream = 2;
constexpr std::uint64_t kInitialLabelStream = 3;

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError, fmt::format("line {}: bad field '{}'", line, field));
  }
  return out;
}

std::string format_count(double v) {
  if (std::isinf(v)) return "inf";
  return fmt::format("{}", v);
}

}  // namespace

// ---------------------------------------------------------------- metrics file

std::string format_metrics_row(const MetricsRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.k, r.t, r.task, r.upcoming_class, r.accuracy, r.reward,
                     r.sqrt_t_error, r.samples);
}

std::vector<MetricsRecord> parse_metrics_csv(std::string_view text) {
  std::vector<MetricsRecord> out;
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view row = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (line == 1) {
      if (row != kMetricsHeader) throw Error(ErrorCode::ParseError, "line 1: unexpected metrics header");
      continue;
    }
    if (row.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      f.push_back(row.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8) throw Error(ErrorCode::RaggedRow, fmt::format("line {}: expected 8 fields", line));
    out.push_back({parse_field<std::size_t>(f[0], line), parse_field<std::size_t>(f[1], line),
                   parse_field<std::size_t>(f[2], line), parse_field<std::size_t>(f[3], line),
                   parse_field<double>(f[4], line), parse_field<double>(f[5], line),
                   parse_field<double>(f[6], line), parse_field<std::uint64_t>(f[7], line)});
  }
  if (line == 0) throw Error(ErrorCode::ParseError, "empty metrics file");
  return out;
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  return parse_metrics_csv(read_text_file(path));
}

// ---------------------------------------------------------------- setup

std::vector<Vector> synthetic_class_means(std::size_t classes, std::size_t dim, double separation) {
  std::vector<Vector> means(classes, Vector(dim, 0.0));
  const double c_count = static_cast<double>(classes);
  if (dim >= classes) {
    // Centred one-hot vectors: a regular simplex with pairwise inner products -1/(C-1) after scaling.
    const double scale = separation / std::sqrt(1.0 - 1.0 / c_count);
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t j = 0; j < classes; ++j) means[c][j] = scale * ((c == j ? 1.0 : 0.0) - 1.0 / c_count);
    }
  } else if (dim >= 2) {
    const double pi = std::acos(-1.0);
    for (std::size_t c = 0; c < classes; ++c) {
      const double angle = 2.0 * pi * static_cast<double>(c) / c_count;
      means[c][0] = separation * std::cos(angle);
      means[c][1] = separation * std::sin(angle);
    }
  } else {
    for (std::size_t c = 0; c < classes; ++c) {
      means[c][0] = separation * (2.0 * static_cast<double>(c) / (c_count - 1.0) - 1.0);
    }
  }
  return means;
}

SyntheticSpec synthetic_spec(const ExperimentConfig& config) {
  const auto& s = config.synthetic;
  SyntheticSpec spec;
  spec.dim = s.dim;
  spec.train_per_task = s.train_per_task;
  spec.val_per_task = s.val_per_task;
  spec.seed = config.seed;

  std::vector<Vector> means = synthetic_class_means(s.classes, s.dim, s.separation);

  Rng init_rng(derive_seed(config.seed, kInitialLabelStream));
  for (std::size_t i = 0; i < s.tasks; ++i) {
    const double d = s.diag.size() == 1 ? s.diag[0] : s.diag[i];
    const double noise = s.noise.size() == 1 ? s.noise[0] : s.noise[i];
    const double off = (1.0 - d) / static_cast<double>(s.classes - 1);
    Matrix p(s.classes, s.classes, off);
    for (std::size_t c = 0; c < s.classes; ++c) p(c, c) = d;
    spec.tasks.push_back({std::move(p), means, std::vector<double>(s.classes, noise),
                          static_cast<ClassId>(init_rng.index(s.classes))});
  }
  return spec;
}

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  ExperimentData data;
  switch (config.data) {
    case DataSource::Synthetic: {
      data.split = make_synthetic(synthetic_spec(config)).split;
      break;
    }
    case DataSource::Csv: {
      const Dataset ds = load_csv(config.csv.path, {config.csv.features, config.csv.label, config.csv.classes});
      std::vector<std::size_t> assignment(ds.size(), 0);
      if (!config.csv.task_column.empty()) assignment = load_csv_column_ids(config.csv.path, config.csv.task_column);
      const std::size_t n_tasks = *std::max_element(assignment.begin(), assignment.end()) + 1;
      data.split = split_tasks(ds, assignment, n_tasks, config.val_fraction);
      break;
    }
    case DataSource::Idx: {
      const Dataset ds = load_idx(config.idx.images, config.idx.labels);
      const std::size_t n_tasks = config.idx.tasks;
      std::vector<std::size_t> assignment(ds.size());
      for (std::size_t r = 0; r < ds.size(); ++r) assignment[r] = r * n_tasks / ds.size();
      data.split = split_tasks(ds, assignment, n_tasks, config.val_fraction);
      break;
    }
  }
  data.num_classes = data.split.pooled_val.num_classes;
  data.dim = data.split.pooled_val.dim;
  for (const auto& task : data.split.tasks) {
    if (task.train().size() < 2) {
      // No transitions to count; every row falls back to uniform.
      log_warn("task {} has {} training rows, using uniform transitions", task.id(), task.train().size());
      data.transitions.push_back(
          estimate_from_counts(data.num_classes, std::vector<std::uint64_t>(data.num_classes * data.num_classes, 0))
              .probs);
      continue;
    }
    data.transitions.push_back(estimate_transitions({task.train().labels, data.num_classes}).probs);
  }
  return data;
}

Hyperparams initial_hyperparams(const ExperimentConfig& config, const ExperimentData& data) {
  const ModelShape shape{data.dim, config.hidden_units, data.num_classes};
  return Hyperparams{ModelParams::random(shape, config.init_scale, derive_seed(config.seed, kInitStream)),
                     std::log(config.inner_lr)};
}

SchedulerArtifacts precompute_artifacts(const ExperimentConfig& config, const ExperimentData& data,
                                        const Hyperparams& lambda) {
  SchedulerArtifacts out;
  const auto& tasks = data.split.tasks;
  const BatchView val = data.split.pooled_val.view();
  switch (config.scheduler) {
    case SchedulerKind::Cyclic:
    case SchedulerKind::Random:
      break;
    case SchedulerKind::Ucb:
      out.ucb_probe = probe_first_batch(lambda.init_params, tasks, val, lambda.inner_step(), config.batch_size);
      break;
    case SchedulerKind::Gittins:
      out.rewards = probe_reward_table(lambda.init_params, tasks, val, lambda.inner_step(), data.num_classes);
      out.gittins = gittins_tables(data.transitions, *out.rewards, config.beta);
      break;
    case SchedulerKind::Mdp: {
      out.rewards = probe_reward_table(lambda.init_params, tasks, val, lambda.inner_step(), data.num_classes);
      MdpPolicy policy = mdp_build(data.transitions, *out.rewards, config.gamma, config.max_states);
      policy.values = mdp_solve_lp(policy);
      out.mdp = std::move(policy);
      break;
    }
  }
  return out;
}

std::unique_ptr<Scheduler> build_scheduler(const ExperimentConfig& config, const ExperimentData& data,
                                           const SchedulerArtifacts& artifacts) {
  const std::size_t n = data.split.tasks.size();
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, std::string("missing precomputed ") + what);
  };
  switch (config.scheduler) {
    case SchedulerKind::Cyclic:
      return make_cyclic_scheduler(n);
    case SchedulerKind::Random:
      return make_random_scheduler(n, derive_seed(config.seed, kRandomSchedulerStream));
    case SchedulerKind::Ucb:
      require(artifacts.ucb_probe.has_value(), "UCB probe");
      return make_ucb_scheduler(ucb_init(*artifacts.ucb_probe, config.ucb_bound, config.xi));
    case SchedulerKind::Gittins:
      require(artifacts.gittins.has_value(), "Gittins table");
      return make_gittins_scheduler(*artifacts.gittins);
    case SchedulerKind::Mdp:
      require(artifacts.mdp.has_value(), "MDP policy");
      return make_mdp_scheduler(*artifacts.mdp);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheduler");
}

// ---------------------------------------------------------------- runs

std::string summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json doc;
  doc["scheduler"] = std::string(to_string(s.scheduler));
  doc["seed"] = s.seed;
  doc["target_accuracy"] = s.target_accuracy;
  doc["samples_to_target"] = s.samples_to_target ? nlohmann::ordered_json(*s.samples_to_target) : nlohmann::ordered_json();
  doc["final_accuracy"] = s.final_accuracy;
  doc["total_samples"] = s.total_samples;
  doc["total_steps"] = s.total_steps;
  doc["epochs"] = s.epochs;
  doc["notes"] = s.notes;
  return doc.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, const MetricsSink& sink) {
  validate_config(config);
  const auto started = std::chrono::steady_clock::now();
  ExperimentData data = load_experiment_data(config);
  const Hyperparams lambda = initial_hyperparams(config, data);

  ExperimentResult result;
  result.artifacts = precompute_artifacts(config, data, lambda);
  auto scheduler = build_scheduler(config, data, result.artifacts);

  TrainingOptions options;
  options.batch_size = config.batch_size;
  options.epochs = config.epochs;
  options.meta_lr = config.meta_lr;
  options.meta_lr_decay = config.meta_lr_decay;
  options.full_meta_val = config.meta_val == MetaValMode::Full;
  options.target_accuracy = config.target_accuracy;
  log_debug("run {} seed {}: {} tasks, {} classes", to_string(config.scheduler), config.seed,
            data.split.tasks.size(), data.num_classes);

  result.training =
      run_meta_training(options, lambda, data.split.tasks, data.split.pooled_val, *scheduler, sink);

  auto& s = result.summary;
  s.scheduler = config.scheduler;
  s.seed = config.seed;
  s.samples_to_target = result.training.samples_to_target;
  s.target_accuracy = config.target_accuracy;
  s.final_accuracy = result.training.final_accuracy;
  s.total_samples = result.training.total_samples;
  s.total_steps = result.training.total_steps;
  s.epochs = config.epochs;
  s.notes = result.training.notes;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

ExperimentResult run_experiment_to_dir(const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary | std::ios::trunc);
  if (!metrics) throw Error(ErrorCode::Io, "cannot write " + (dir / "metrics.csv").string());
  metrics << kMetricsHeader << '\n';
  const MetricsSink sink = [&metrics](const MetricsRecord& r) { metrics << format_metrics_row(r) << '\n'; };

  ExperimentResult result;
  try {
    result = run_experiment(config, sink);
  } catch (const std::exception& e) {
    metrics.flush();
    write_text_file(dir / "error.txt", std::string(e.what()) + "\n");
    throw;
  }
  metrics.close();
  if (!metrics) throw Error(ErrorCode::Io, "write failed for metrics.csv");

  write_text_file(dir / "summary.json", summary_to_json(result.summary));
  write_text_file(dir / "timing.json", fmt::format("{{\n  \"wall_seconds\": {}\n}}\n", result.wall_seconds));
  write_text_file(dir / "hyperparams.json", hyperparams_to_json(result.training.hyperparams) + "\n");
  const auto& a = result.artifacts;
  if (a.rewards) write_text_file(dir / "reward_table.json", reward_table_to_json(*a.rewards) + "\n");
  if (a.gittins) write_text_file(dir / "gittins.json", gittins_to_json(*a.gittins) + "\n");
  if (a.mdp) write_text_file(dir / "mdp.json", mdp_values_to_json(*a.mdp) + "\n");
  return result;
}

// ---------------------------------------------------------------- comparison

const EfficiencyRow* EfficiencyTable::find(SchedulerKind kind) const noexcept {
  for (const auto& row : rows) {
    if (row.kind == kind) return &row;
  }
  return nullptr;
}

double median_samples(std::span<const std::optional<std::uint64_t>> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  std::vector<double> v;
  for (const auto& s : samples) v.push_back(s ? static_cast<double>(*s) : kInf);
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  if (std::isinf(v[m - 1]) || std::isinf(v[m])) return kInf;
  return 0.5 * (v[m - 1] + v[m]);
}

double efficiency_ratio(double baseline_median, double median) {
  if (std::isinf(median)) return 0.0;
  if (std::isinf(baseline_median)) return kInf;
  return baseline_median / median;
}

EfficiencyTable compare_schedulers(const ExperimentConfig& config, std::span<const SchedulerKind> schedulers,
                                   std::span<const std::uint64_t> seeds) {
  if (std::find(schedulers.begin(), schedulers.end(), SchedulerKind::Cyclic) == schedulers.end()) {
    throw Error(ErrorCode::BaselineMissing, "cyclic must be among the compared schedulers");
  }
  if (seeds.empty()) throw Error(ErrorCode::EmptyInput, "no seeds");

  std::vector<SchedulerKind> kinds(schedulers.begin(), schedulers.end());
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  EfficiencyTable table;
  table.seeds.assign(seeds.begin(), seeds.end());
  for (SchedulerKind kind : kinds) {
    EfficiencyRow row;
    row.kind = kind;
    for (std::uint64_t seed : seeds) {
      ExperimentConfig run = config;
      run.scheduler = kind;
      run.seed = seed;
      try {
        row.samples.push_back(run_experiment(run).summary.samples_to_target);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StateSpaceTooLarge) throw;
        row.ran = false;
        row.not_run_reason = e.what();
        row.samples.clear();
        break;
      }
    }
    table.rows.push_back(std::move(row));
  }

  const EfficiencyRow& base = *table.find(SchedulerKind::Cyclic);
  const double base_median = median_samples(base.samples);
  auto as_double = [](const std::optional<std::uint64_t>& s) { return s ? static_cast<double>(*s) : kInf; };
  for (auto& row : table.rows) {
    if (!row.ran) continue;
    row.median = median_samples(row.samples);
    row.ratio = efficiency_ratio(base_median, row.median);
    std::size_t wins = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (as_double(row.samples[i]) < as_double(base.samples[i])) ++wins;
    }
    row.win_fraction = static_cast<double>(wins) / static_cast<double>(seeds.size());
  }
  return table;
}

std::string efficiency_csv(const EfficiencyTable& table) {
  std::string out = "scheduler,median_samples,ratio,win_fraction,seeds_reached\n";
  for (const auto& row : table.rows) {
    if (!row.ran) {
      out += fmt::format("{},not run,not run,not run,0\n", to_string(row.kind));
      continue;
    }
    const auto reached = std::count_if(row.samples.begin(), row.samples.end(), [](const auto& s) { return s.has_value(); });
    out += fmt::format("{},{},{},{},{}\n", to_string(row.kind), format_count(row.median), format_count(row.ratio),
                       row.win_fraction, reached);
  }
  return out;
}

std::string efficiency_text(const EfficiencyTable& table) {
  std::string out = fmt::format("{:<10} {:>14} {:>10} {:>8} {:>9}\n", "scheduler", "median samples", "ratio",
                                "wins", "reached");
  for (const auto& row : table.rows) {
    if (!row.ran) {
      out += fmt::format("{:<10} {:>14} {:>10} {:>8} {:>9}\n", to_string(row.kind), "not run", "/", "/", "/");
      continue;
    }
    const auto reached = std::count_if(row.samples.begin(), row.samples.end(), [](const auto& s) { return s.has_value(); });
    const std::string median = std::isinf(row.median) ? "inf" : fmt::format("{:.1f}", row.median);
    const std::string ratio = std::isinf(row.ratio) ? "inf" : fmt::format("{:.3f}", row.ratio);
    out += fmt::format("{:<10} {:>14} {:>10} {:>8.2f} {:>6}/{:<2}\n", to_string(row.kind), median, ratio,
                       row.win_fraction, reached, row.samples.size());
  }
  return out;
}

}  // namespace metasched
