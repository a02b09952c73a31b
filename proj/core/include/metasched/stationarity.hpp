#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "metasched/markov.hpp"
#include "metasched/training.hpp"

namespace metasched {

struct StationarityOptions {
  std::size_t min_steps = 50;     // fewer metrics rows -> TooFewSteps
  std::size_t t_begin = 20;       // inclusive range of inner steps used for the CV
  std::size_t t_end = 120;
  std::size_t window = 10;        // width of the windowed means, in inner steps
  double cv_threshold = 0.3;
};

struct WindowMean {
  std::size_t t_first = 0;  // window covers [t_first, t_first + width)
  std::size_t points = 0;
  double mean = 0.0;
};

/// sqrt(t) * e_t for one (task, class) pair, in metrics order.
struct StationaritySeries {
  std::size_t task = 0;
  ClassId cls = 0;
  std::vector<std::size_t> k;
  std::vector<std::size_t> t;
  std::vector<double> values;
  std::vector<WindowMean> windows;
  std::size_t points_in_range = 0;
  double mean = 0.0;
  double stddev = 0.0;   // population
  double cv = 0.0;       // stddev / |mean|; 0 for an all-zero range, NaN below 2 points
  bool flagged = false;  // cv above the threshold
};

struct StationarityReport {
  StationarityOptions options;
  std::vector<StationaritySeries> series;  // ordered by (task, class)
  std::size_t stationary_count() const noexcept;
  std::size_t assessed_count() const noexcept;  // series with a defined cv
};

/// Throws TooFewSteps below options.min_steps records.
StationarityReport stationarity_report(std::span<const MetricsRecord> metrics,
                                       const StationarityOptions& options = {});

/// Long format: task,class,k,t,sqrt_t_error
std::string stationarity_series_csv(const StationarityReport& report);
/// One row per series: task,class,points,mean,stddev,cv,flagged
std::string stationarity_summary_csv(const StationarityReport& report);
/// task,class,t_first,points,mean
std::string stationarity_windows_csv(const StationarityReport& report);

}  // namespace metasched
