#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metasched/markov.hpp"
#include "metasched/numerics.hpp"

namespace metasched {

/// Non-owning view over a contiguous run of examples.
struct BatchView {
  std::span<const double> features;  // size() * dim, row-major
  std::span<const ClassId> labels;
  std::size_t dim = 0;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::span<const double> x(std::size_t i) const noexcept { return features.subspan(i * dim, dim); }
};

/// Examples in source order. Order matters: it carries the label dynamics the
/// Markov-aware schedulers exploit, so nothing in this module reorders rows.
struct Dataset {
  std::vector<double> features;
  std::vector<ClassId> labels;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;  // dense id -> source label
  std::string provenance;

  std::size_t size() const noexcept { return labels.size(); }
  BatchView view() const noexcept { return view(0, size()); }
  BatchView view(std::size_t begin, std::size_t end) const noexcept {
    return {std::span<const double>(features).subspan(begin * dim, (end - begin) * dim),
            std::span<const ClassId>(labels).subspan(begin, end - begin), dim};
  }
  /// Copy of rows [begin, end) keeping dim / classes / names.
  Dataset slice(std::size_t begin, std::size_t end) const;
  void append(std::span<const double> x, ClassId label);
  LabelSequence label_sequence() const { return {labels, num_classes}; }
};

/// One meta-training subset: an ordered train slice consumed through a cursor
/// plus this task's contribution to the pooled validation set.
class TaskSubset {
 public:
  TaskSubset(std::size_t id, Dataset train, Dataset val);

  std::size_t id() const noexcept { return id_; }
  const Dataset& train() const noexcept { return train_; }
  const Dataset& val() const noexcept { return val_; }
  std::size_t cursor() const noexcept { return cursor_; }
  std::size_t remaining() const noexcept { return train_.size() - cursor_; }
  bool exhausted() const noexcept { return cursor_ >= train_.size(); }
  /// Classes that occur in the training slice.
  const std::vector<ClassId>& classes() const noexcept { return classes_; }

  /// Label of the next unread example, without consuming it.
  std::optional<ClassId> peek() const noexcept;

  /// Returns min(B, remaining) examples in order and advances the cursor.
  /// Throws Exhausted at the end of the slice.
  BatchView next_batch(std::size_t batch_size);

  void rewind() noexcept { cursor_ = 0; }

 private:
  std::size_t id_;
  Dataset train_;
  Dataset val_;
  std::size_t cursor_ = 0;
  std::vector<ClassId> classes_;
};

struct TaskSplit {
  std::vector<TaskSubset> tasks;
  Dataset pooled_val;
};

// ---------------------------------------------------------------- CSV

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column;
  /// When non-empty, labels are mapped to ids in this order and anything else
  /// is UnknownLabel. Otherwise ids follow first appearance.
  std::vector<std::string> classes;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Reads one extra integer column (e.g. a task id) aligned with load_csv rows.
std::vector<std::size_t> load_csv_column_ids(const std::filesystem::path& path,
                                             const std::string& column);

/// Writes features with shortest round-trip formatting and labels by name.
void write_csv(const std::filesystem::path& path, const Dataset& ds, const CsvSchema& schema);

// ---------------------------------------------------------------- IDX

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// MNIST-format images + labels; pixel value = byte / 255.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

// ---------------------------------------------------------------- splitting

/// Groups examples by task (order preserved) and carves the tail
/// floor(len * val_fraction) examples of each task into its validation part.
TaskSplit split_tasks(const Dataset& ds, std::span<const std::size_t> assignment,
                      std::size_t num_tasks, double val_fraction);

// ---------------------------------------------------------------- synthetic

struct SyntheticTaskSpec {
  Matrix transitions;                 // C x C row-stochastic
  std::vector<Vector> class_means;    // C vectors of length dim
  std::vector<double> class_stds;     // C isotropic standard deviations
  ClassId initial_label = 0;
};

struct SyntheticSpec {
  std::vector<SyntheticTaskSpec> tasks;
  std::size_t dim = 0;
  std::size_t train_per_task = 0;
  std::size_t val_per_task = 0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  TaskSplit split;
  std::vector<Matrix> true_transitions;
};

/// Per task: one Markov label stream of length train + val, Gaussian features
/// per (task, class); the tail val_per_task examples become validation data.
SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace metasched
