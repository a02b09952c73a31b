#include "metasched/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "metasched/error.hpp"
#include "metasched/random.hpp"

namespace metasched {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  // (1-based line number, fields)
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      for (auto f : fields) table.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, header has " +
                                            std::to_string(table.header.size()));
    }
    std::vector<std::string> owned(fields.begin(), fields.end());
    table.rows.emplace_back(line_no, std::move(owned));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "line 1: missing header in " + path.string());
  return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw Error(ErrorCode::ParseError, "line 1: header lacks column '" + name + "'");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> numbered_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

}  // namespace

// ---------------------------------------------------------------- Dataset

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  Dataset out;
  out.dim = dim;
  out.num_classes = num_classes;
  out.class_names = class_names;
  out.provenance = provenance;
  out.features.assign(features.begin() + static_cast<std::ptrdiff_t>(begin * dim),
                      features.begin() + static_cast<std::ptrdiff_t>(end * dim));
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void Dataset::append(std::span<const double> x, ClassId label) {
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

// ---------------------------------------------------------------- TaskSubset

TaskSubset::TaskSubset(std::size_t id, Dataset train, Dataset val)
    : id_(id), train_(std::move(train)), val_(std::move(val)) {
  std::set<ClassId> seen(train_.labels.begin(), train_.labels.end());
  classes_.assign(seen.begin(), seen.end());
}

std::optional<ClassId> TaskSubset::peek() const noexcept {
  if (exhausted()) return std::nullopt;
  return train_.labels[cursor_];
}

BatchView TaskSubset::next_batch(std::size_t batch_size) {
  if (exhausted()) {
    throw Error(ErrorCode::Exhausted, "task " + std::to_string(id_) + " has no unread examples");
  }
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  const std::size_t take = std::min(batch_size, remaining());
  const BatchView batch = train_.view(cursor_, cursor_ + take);
  cursor_ += take;
  return batch;
}

// ---------------------------------------------------------------- CSV

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const CsvTable table = read_csv_table(path);
  std::vector<std::size_t> feature_idx;
  for (const auto& name : schema.feature_columns) feature_idx.push_back(column_index(table, name));
  const std::size_t label_idx = column_index(table, schema.label_column);

  Dataset ds;
  ds.dim = feature_idx.size();
  ds.provenance = "csv:" + path.string();
  std::map<std::string, ClassId> ids;
  for (std::size_t i = 0; i < schema.classes.size(); ++i) {
    ids.emplace(schema.classes[i], i);
    ds.class_names.push_back(schema.classes[i]);
  }
  const bool fixed_classes = !schema.classes.empty();

  std::vector<double> x(ds.dim);
  for (const auto& [line_no, fields] : table.rows) {
    for (std::size_t j = 0; j < feature_idx.size(); ++j) {
      const auto v = parse_double(fields[feature_idx[j]]);
      if (!v) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": column '" +
                                               schema.feature_columns[j] + "' value '" +
                                               fields[feature_idx[j]] + "' is not a finite number");
      }
      x[j] = *v;
    }
    const std::string& raw = fields[label_idx];
    auto it = ids.find(raw);
    if (it == ids.end()) {
      if (fixed_classes) {
        throw Error(ErrorCode::UnknownLabel,
                    "line " + std::to_string(line_no) + ": label '" + raw + "' not in schema");
      }
      it = ids.emplace(raw, ds.class_names.size()).first;
      ds.class_names.push_back(raw);
    }
    ds.append(x, it->second);
  }
  ds.num_classes = ds.class_names.size();
  if (ds.size() == 0) throw Error(ErrorCode::ParseError, "no data rows in " + path.string());
  return ds;
}

std::vector<std::size_t> load_csv_column_ids(const std::filesystem::path& path,
                                             const std::string& column) {
  const CsvTable table = read_csv_table(path);
  const std::size_t idx = column_index(table, column);
  std::vector<std::size_t> out;
  out.reserve(table.rows.size());
  for (const auto& [line_no, fields] : table.rows) {
    const std::string& s = fields[idx];
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": column '" + column +
                                             "' value '" + s + "' is not a non-negative integer");
    }
    out.push_back(v);
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& ds, const CsvSchema& schema) {
  if (schema.feature_columns.size() != ds.dim) {
    throw Error(ErrorCode::ShapeMismatch, "schema feature count differs from dataset dim");
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& name : schema.feature_columns) out << name << ',';
  out << schema.label_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim; ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, ds.features[i * ds.dim + j]);
      out.write(buf, ptr - buf);
      out << ',';
    }
    const ClassId label = ds.labels[i];
    out << (label < ds.class_names.size() ? ds.class_names[label] : std::to_string(label)) << '\n';
  }
}

// ---------------------------------------------------------------- IDX

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
  if (images.size() < 16) throw Error(ErrorCode::Truncated, "image header shorter than 16 bytes");
  if (labels.size() < 8) throw Error(ErrorCode::Truncated, "label header shorter than 8 bytes");
  if (read_be32(images, 0) != kIdxImageMagic) {
    throw Error(ErrorCode::BadMagic, "image file magic is not 0x00000803");
  }
  if (read_be32(labels, 0) != kIdxLabelMagic) {
    throw Error(ErrorCode::BadMagic, "label file magic is not 0x00000801");
  }
  const std::size_t count = read_be32(images, 4);
  const std::size_t rows = read_be32(images, 8);
  const std::size_t cols = read_be32(images, 12);
  const std::size_t label_count = read_be32(labels, 4);
  if (count != label_count) {
    throw Error(ErrorCode::CountMismatch, std::to_string(count) + " images vs " +
                                              std::to_string(label_count) + " labels");
  }
  const std::size_t dim = rows * cols;
  if (images.size() - 16 < count * dim) {
    throw Error(ErrorCode::Truncated, "image payload has " + std::to_string(images.size() - 16) +
                                          " bytes, expected " + std::to_string(count * dim));
  }
  if (labels.size() - 8 < count) {
    throw Error(ErrorCode::Truncated, "label payload shorter than the item count");
  }

  Dataset ds;
  ds.dim = dim;
  ds.provenance = "idx";
  ds.features.resize(count * dim);
  for (std::size_t i = 0; i < count * dim; ++i) {
    ds.features[i] = static_cast<double>(images[16 + i]) / 255.0;
  }
  ds.labels.resize(count);
  std::size_t max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    ds.labels[i] = labels[8 + i];
    max_label = std::max<std::size_t>(max_label, labels[8 + i]);
  }
  ds.num_classes = count == 0 ? 0 : max_label + 1;
  ds.class_names = numbered_names(ds.num_classes);
  return ds;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto image_bytes = read_bytes(images);
  const auto label_bytes = read_bytes(labels);
  Dataset ds = parse_idx(image_bytes, label_bytes);
  ds.provenance = "idx:" + images.string();
  return ds;
}

// ---------------------------------------------------------------- splitting

TaskSplit split_tasks(const Dataset& ds, std::span<const std::size_t> assignment,
                      std::size_t num_tasks, double val_fraction) {
  if (assignment.size() != ds.size()) {
    throw Error(ErrorCode::ShapeMismatch, "assignment length differs from dataset size");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "val_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> members(num_tasks);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= num_tasks) {
      throw Error(ErrorCode::InvalidArgument, "task id " + std::to_string(assignment[i]) +
                                                  " at row " + std::to_string(i) + " out of range");
    }
    members[assignment[i]].push_back(i);
  }

  TaskSplit out;
  out.pooled_val.dim = ds.dim;
  out.pooled_val.num_classes = ds.num_classes;
  out.pooled_val.class_names = ds.class_names;
  out.pooled_val.provenance = ds.provenance + " (pooled validation)";
  for (std::size_t task = 0; task < num_tasks; ++task) {
    const auto& rows = members[task];
    const auto n_val = static_cast<std::size_t>(
        std::floor(static_cast<double>(rows.size()) * val_fraction + 1e-9));
    if (rows.size() <= n_val) {
      throw Error(ErrorCode::EmptyTask, "task " + std::to_string(task) + " has no training examples");
    }
    Dataset train;
    Dataset val;
    for (Dataset* d : {&train, &val}) {
      d->dim = ds.dim;
      d->num_classes = ds.num_classes;
      d->class_names = ds.class_names;
      d->provenance = ds.provenance;
    }
    const std::size_t n_train = rows.size() - n_val;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::size_t r = rows[k];
      const auto x = std::span<const double>(ds.features).subspan(r * ds.dim, ds.dim);
      (k < n_train ? train : val).append(x, ds.labels[r]);
      if (k >= n_train) out.pooled_val.append(x, ds.labels[r]);
    }
    out.tasks.emplace_back(task, std::move(train), std::move(val));
  }
  if (out.pooled_val.size() == 0) {
    throw Error(ErrorCode::EmptyTask, "pooled validation set is empty");
  }
  return out;
}

// ---------------------------------------------------------------- synthetic

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.tasks.empty()) throw Error(ErrorCode::InvalidArgument, "synthetic spec has no tasks");
  if (spec.train_per_task == 0) throw Error(ErrorCode::InvalidArgument, "train_per_task must be positive");
  std::size_t num_classes = 0;
  for (const auto& t : spec.tasks) num_classes = std::max(num_classes, t.transitions.rows());

  SyntheticData out;
  out.split.pooled_val.dim = spec.dim;
  out.split.pooled_val.num_classes = num_classes;
  out.split.pooled_val.class_names = numbered_names(num_classes);
  out.split.pooled_val.provenance = "synthetic (pooled validation)";

  const std::size_t length = spec.train_per_task + spec.val_per_task;
  for (std::size_t i = 0; i < spec.tasks.size(); ++i) {
    const auto& t = spec.tasks[i];
    const std::size_t c = t.transitions.rows();
    if (t.class_means.size() != c || t.class_stds.size() != c) {
      throw Error(ErrorCode::ShapeMismatch, "task " + std::to_string(i) + " needs C means and stds");
    }
    for (std::size_t k = 0; k < c; ++k) {
      if (t.class_means[k].size() != spec.dim) {
        throw Error(ErrorCode::ShapeMismatch, "class mean dimension differs from dim");
      }
      if (!(t.class_stds[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "class stds must be > 0");
    }
    const LabelSequence seq =
        generate_markov_stream(t.transitions, t.initial_label, length, derive_seed(spec.seed, 2 * i));
    Rng noise(derive_seed(spec.seed, 2 * i + 1));

    Dataset all;
    all.dim = spec.dim;
    all.num_classes = num_classes;
    all.class_names = numbered_names(num_classes);
    all.provenance = "synthetic task " + std::to_string(i);
    std::vector<double> x(spec.dim);
    for (ClassId label : seq.labels) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        x[j] = t.class_means[label][j] + t.class_stds[label] * noise.normal();
      }
      all.append(x, label);
    }
    Dataset train = all.slice(0, spec.train_per_task);
    Dataset val = all.slice(spec.train_per_task, length);
    for (std::size_t r = 0; r < val.size(); ++r) out.split.pooled_val.append(val.view().x(r), val.labels[r]);
    out.split.tasks.emplace_back(i, std::move(train), std::move(val));
    out.true_transitions.push_back(t.transitions);
  }
  return out;
}

}  // namespace metasched
