#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "metasched/error.hpp"
#include "metasched/scheduler.hpp"

namespace metasched {

/// BadValue / MissingKey failure that remembers which key caused it.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string key, std::string reason);
  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

enum class DataSource { Synthetic, Csv, Idx };
enum class MetaValMode { Batch, Full };

std::string_view to_string(DataSource source) noexcept;
std::string_view to_string(MetaValMode mode) noexcept;

struct SyntheticConfig {
  std::size_t tasks = 2;
  std::size_t classes = 2;
  std::size_t dim = 2;
  std::size_t train_per_task = 200;
  std::size_t val_per_task = 50;
  std::vector<double> diag{0.8};   // self-transition probability, one or per task
  std::vector<double> noise{1.0};  // class std, one or per task
  double separation = 2.0;         // scale of the class means
  friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

struct CsvConfig {
  std::string path;
  std::string label;
  std::vector<std::string> features;
  std::string task_column;  // empty: a single task
  std::vector<std::string> classes;
  friend bool operator==(const CsvConfig&, const CsvConfig&) = default;
};

struct IdxConfig {
  std::string images;
  std::string labels;
  std::size_t tasks = 1;  // contiguous blocks in file order
  friend bool operator==(const IdxConfig&, const IdxConfig&) = default;
};

struct CompareConfig {
  std::vector<SchedulerKind> schedulers;
  std::vector<std::uint64_t> seeds;
  friend bool operator==(const CompareConfig&, const CompareConfig&) = default;
};

struct ExperimentConfig {
  DataSource data = DataSource::Synthetic;
  SchedulerKind scheduler = SchedulerKind::Cyclic;
  std::uint64_t seed = 0;

  std::size_t batch_size = 4;
  std::size_t epochs = 1;
  double meta_lr = 0.05;
  bool meta_lr_decay = false;
  double inner_lr = 0.1;
  double beta = 0.9;
  double gamma = 0.9;
  double ucb_bound = 2.0;
  double xi = 2.0;
  double target_accuracy = 0.8;
  std::size_t hidden_units = 0;
  double init_scale = 0.01;
  double val_fraction = 0.2;
  MetaValMode meta_val = MetaValMode::Batch;
  std::size_t max_states = 4096;
  std::string output_dir = "out";

  SyntheticConfig synthetic;
  CsvConfig csv;
  IdxConfig idx;
  CompareConfig compare;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Flat "key = value" text, one entry per line, '#' starts a comment.
/// Lists are comma separated. Required keys: data, scheduler, seed.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Emits every key in a fixed order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
/// Throws BadValue for the first field that breaks an invariant.
void validate_config(const ExperimentConfig& config);

}  // namespace metasched
