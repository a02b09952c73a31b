#include "metasched/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace metasched {

ConfigError::ConfigError(ErrorCode code, std::string key, std::string reason)
    : Error(code, key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}

std::string_view to_string(DataSource source) noexcept {
  switch (source) {
    case DataSource::Synthetic: return "synthetic";
    case DataSource::Csv: return "csv";
    case DataSource::Idx: return "idx";
  }
  return "unknown";
}

std::string_view to_string(MetaValMode mode) noexcept {
  return mode == MetaValMode::Full ? "full" : "batch";
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& reason) {
  throw ConfigError(ErrorCode::BadValue, key, reason);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.emplace_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad(key, fmt::format("expected a real number, got '{}'", v));
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    bad(key, fmt::format("expected a non-negative integer, got '{}'", v));
  }
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, fmt::format("expected true or false, got '{}'", v));
}

SchedulerKind to_scheduler(const std::string& key, std::string_view v) {
  const auto kind = parse_scheduler_kind(v);
  if (!kind) bad(key, fmt::format("unknown scheduler '{}'", v));
  return *kind;
}

std::vector<double> to_doubles(const std::string& key, std::string_view v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) bad(key, "empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"data",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         if (v == "synthetic") c.data = DataSource::Synthetic;
         else if (v == "csv") c.data = DataSource::Csv;
         else if (v == "idx") c.data = DataSource::Idx;
         else bad(k, fmt::format("unknown data source '{}'", v));
       }},
      {"scheduler",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.scheduler = to_scheduler(k, v);
       }},
      {"seed", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.seed = to_u64(k, v); }},
      {"batch_size",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.batch_size = to_u64(k, v); }},
      {"epochs", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.epochs = to_u64(k, v); }},
      {"meta_lr", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.meta_lr = to_double(k, v); }},
      {"meta_lr_decay",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.meta_lr_decay = to_bool(k, v); }},
      {"inner_lr",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.inner_lr = to_double(k, v); }},
      {"beta", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.beta = to_double(k, v); }},
      {"gamma", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.gamma = to_double(k, v); }},
      {"ucb_bound",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.ucb_bound = to_double(k, v); }},
      {"xi", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.xi = to_double(k, v); }},
      {"target_accuracy",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.target_accuracy = to_double(k, v); }},
      {"hidden_units",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.hidden_units = to_u64(k, v); }},
      {"init_scale",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.init_scale = to_double(k, v); }},
      {"val_fraction",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.val_fraction = to_double(k, v); }},
      {"meta_val",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         if (v == "batch") c.meta_val = MetaValMode::Batch;
         else if (v == "full") c.meta_val = MetaValMode::Full;
         else bad(k, "expected batch or full");
       }},
      {"max_states",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.max_states = to_u64(k, v); }},
      {"output_dir",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.output_dir = std::string(v); }},

      {"synthetic.tasks",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.tasks = to_u64(k, v); }},
      {"synthetic.classes",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.classes = to_u64(k, v); }},
      {"synthetic.dim",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.dim = to_u64(k, v); }},
      {"synthetic.train_per_task",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.synthetic.train_per_task = to_u64(k, v);
       }},
      {"synthetic.val_per_task",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.val_per_task = to_u64(k, v); }},
      {"synthetic.diag",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.diag = to_doubles(k, v); }},
      {"synthetic.noise",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.synthetic.noise = to_doubles(k, v); }},
      {"synthetic.separation",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.synthetic.separation = to_double(k, v);
       }},

      {"csv.path", [](ExperimentConfig& c, const std::string&, std::string_view v) { c.csv.path = std::string(v); }},
      {"csv.label",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.csv.label = std::string(v); }},
      {"csv.features",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.csv.features = split_list(v); }},
      {"csv.task_column",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.csv.task_column = std::string(v); }},
      {"csv.classes",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.csv.classes = split_list(v); }},

      {"idx.images",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.idx.images = std::string(v); }},
      {"idx.labels",
       [](ExperimentConfig& c, const std::string&, std::string_view v) { c.idx.labels = std::string(v); }},
      {"idx.tasks", [](ExperimentConfig& c, const std::string& k, std::string_view v) { c.idx.tasks = to_u64(k, v); }},

      {"compare.schedulers",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.compare.schedulers.clear();
         for (const auto& item : split_list(v)) c.compare.schedulers.push_back(to_scheduler(k, item));
       }},
      {"compare.seeds",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.compare.seeds.clear();
         for (const auto& item : split_list(v)) c.compare.seeds.push_back(to_u64(k, item));
       }},
  };
  return table;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      bad(fmt::format("line {}", line_no), "expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) bad(key, "unknown key");
    if (!seen.insert(key).second) bad(key, "duplicate key");
    it->second(config, key, value);
  }
  for (const char* required : {"data", "scheduler", "seed"}) {
    if (!seen.contains(required)) throw ConfigError(ErrorCode::MissingKey, required, "required");
  }
  validate_config(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& c) {
  if (c.batch_size < 1) bad("batch_size", "must be at least 1");
  if (!(c.beta > 0.0 && c.beta < 1.0)) bad("beta", "must lie in (0, 1)");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) bad("gamma", "must lie in (0, 1)");
  if (!(c.xi > 1.0)) bad("xi", "must exceed 1");
  if (!(c.ucb_bound > 0.0)) bad("ucb_bound", "must be positive");
  if (!(c.inner_lr > 0.0)) bad("inner_lr", "must be positive");
  if (!(c.meta_lr >= 0.0)) bad("meta_lr", "must be non-negative");
  if (!(c.target_accuracy > 0.0 && c.target_accuracy <= 1.0)) bad("target_accuracy", "must lie in (0, 1]");
  if (!(c.val_fraction > 0.0 && c.val_fraction < 1.0)) bad("val_fraction", "must lie in (0, 1)");
  if (!(c.init_scale >= 0.0)) bad("init_scale", "must be non-negative");
  if (c.hidden_units > kMaxHiddenUnits) bad("hidden_units", fmt::format("at most {}", kMaxHiddenUnits));
  if (c.max_states < 1) bad("max_states", "must be at least 1");

  const auto& s = c.synthetic;
  if (c.data == DataSource::Synthetic) {
    if (s.tasks < 1) bad("synthetic.tasks", "must be at least 1");
    if (s.classes < 2) bad("synthetic.classes", "must be at least 2");
    if (s.dim < 1) bad("synthetic.dim", "must be at least 1");
    if (s.train_per_task < 1) bad("synthetic.train_per_task", "must be at least 1");
    if (s.val_per_task < 1) bad("synthetic.val_per_task", "must be at least 1");
  }
  if (s.diag.size() != 1 && s.diag.size() != s.tasks) bad("synthetic.diag", "need one value or one per task");
  for (double d : s.diag) {
    if (!(d >= 0.0 && d <= 1.0)) bad("synthetic.diag", "must lie in [0, 1]");
  }
  if (s.noise.size() != 1 && s.noise.size() != s.tasks) bad("synthetic.noise", "need one value or one per task");
  for (double n : s.noise) {
    if (!(n > 0.0)) bad("synthetic.noise", "must be positive");
  }
  if (!(s.separation >= 0.0)) bad("synthetic.separation", "must be non-negative");

  if (c.data == DataSource::Csv) {
    if (c.csv.path.empty()) throw ConfigError(ErrorCode::MissingKey, "csv.path", "required for csv data");
    if (c.csv.label.empty()) throw ConfigError(ErrorCode::MissingKey, "csv.label", "required for csv data");
    if (c.csv.features.empty()) throw ConfigError(ErrorCode::MissingKey, "csv.features", "required for csv data");
  }
  if (c.data == DataSource::Idx) {
    if (c.idx.images.empty()) throw ConfigError(ErrorCode::MissingKey, "idx.images", "required for idx data");
    if (c.idx.labels.empty()) throw ConfigError(ErrorCode::MissingKey, "idx.labels", "required for idx data");
    if (c.idx.tasks < 1) bad("idx.tasks", "must be at least 1");
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("data", std::string(to_string(c.data)));
  put("scheduler", std::string(to_string(c.scheduler)));
  put("seed", std::to_string(c.seed));
  put("batch_size", std::to_string(c.batch_size));
  put("epochs", std::to_string(c.epochs));
  put("meta_lr", num(c.meta_lr));
  put("meta_lr_decay", c.meta_lr_decay ? "true" : "false");
  put("inner_lr", num(c.inner_lr));
  put("beta", num(c.beta));
  put("gamma", num(c.gamma));
  put("ucb_bound", num(c.ucb_bound));
  put("xi", num(c.xi));
  put("target_accuracy", num(c.target_accuracy));
  put("hidden_units", std::to_string(c.hidden_units));
  put("init_scale", num(c.init_scale));
  put("val_fraction", num(c.val_fraction));
  put("meta_val", std::string(to_string(c.meta_val)));
  put("max_states", std::to_string(c.max_states));
  put("output_dir", c.output_dir);

  put("synthetic.tasks", std::to_string(c.synthetic.tasks));
  put("synthetic.classes", std::to_string(c.synthetic.classes));
  put("synthetic.dim", std::to_string(c.synthetic.dim));
  put("synthetic.train_per_task", std::to_string(c.synthetic.train_per_task));
  put("synthetic.val_per_task", std::to_string(c.synthetic.val_per_task));
  put("synthetic.diag", join_doubles(c.synthetic.diag));
  put("synthetic.noise", join_doubles(c.synthetic.noise));
  put("synthetic.separation", num(c.synthetic.separation));

  put("csv.path", c.csv.path);
  put("csv.label", c.csv.label);
  put("csv.features", fmt::format("{}", fmt::join(c.csv.features, ",")));
  put("csv.task_column", c.csv.task_column);
  put("csv.classes", fmt::format("{}", fmt::join(c.csv.classes, ",")));

  put("idx.images", c.idx.images);
  put("idx.labels", c.idx.labels);
  put("idx.tasks", std::to_string(c.idx.tasks));

  std::vector<std::string_view> names;
  for (auto k : c.compare.schedulers) names.push_back(to_string(k));
  put("compare.schedulers", fmt::format("{}", fmt::join(names, ",")));
  put("compare.seeds", fmt::format("{}", fmt::join(c.compare.seeds, ",")));
  return out;
}

}  // namespace metasched
