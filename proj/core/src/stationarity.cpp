#include "metasched/stationarity.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "metasched/error.hpp"

namespace metasched {

std::size_t StationarityReport::stationary_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : series) n += (!std::isnan(s.cv) && !s.flagged) ? 1 : 0;
  return n;
}

std::size_t StationarityReport::assessed_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : series) n += std::isnan(s.cv) ? 0 : 1;
  return n;
}

StationarityReport stationarity_report(std::span<const MetricsRecord> metrics,
                                       const StationarityOptions& options) {
  if (metrics.size() < options.min_steps) {
    throw Error(ErrorCode::TooFewSteps,
                fmt::format("{} inner steps, need at least {}", metrics.size(), options.min_steps));
  }
  if (options.window == 0) throw Error(ErrorCode::InvalidArgument, "window must be positive");

  std::map<std::pair<std::size_t, ClassId>, StationaritySeries> by_key;
  for (const auto& r : metrics) {
    auto& s = by_key[{r.task, r.upcoming_class}];
    s.task = r.task;
    s.cls = r.upcoming_class;
    s.k.push_back(r.k);
    s.t.push_back(r.t);
    s.values.push_back(r.sqrt_t_error);
  }

  StationarityReport report{options, {}};
  for (auto& [key, s] : by_key) {
    double sum = 0.0;
    std::size_t n = 0;
    std::map<std::size_t, std::pair<double, std::size_t>> windows;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      auto& w = windows[(s.t[i] - 1) / options.window];
      w.first += s.values[i];
      ++w.second;
      if (s.t[i] >= options.t_begin && s.t[i] <= options.t_end) {
        sum += s.values[i];
        ++n;
      }
    }
    for (const auto& [idx, acc] : windows) {
      s.windows.push_back({idx * options.window + 1, acc.second, acc.first / static_cast<double>(acc.second)});
    }
    s.points_in_range = n;
    if (n < 2) {
      s.cv = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.t[i] >= options.t_begin && s.t[i] <= options.t_end) ss += (s.values[i] - s.mean) * (s.values[i] - s.mean);
      }
      s.stddev = std::sqrt(ss / static_cast<double>(n));
      if (s.mean == 0.0) {
        s.cv = s.stddev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      } else {
        s.cv = s.stddev / std::abs(s.mean);
      }
      s.flagged = s.cv > options.cv_threshold;
    }
    report.series.push_back(std::move(s));
  }
  return report;
}

std::string stationarity_series_csv(const StationarityReport& report) {
  std::string out = "task,class,k,t,sqrt_t_error\n";
  for (const auto& s : report.series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out += fmt::format("{},{},{},{},{}\n", s.task, s.cls, s.k[i], s.t[i], s.values[i]);
    }
  }
  return out;
}

std::string stationarity_summary_csv(const StationarityReport& report) {
  std::string out = "task,class,points,mean,stddev,cv,flagged\n";
  for (const auto& s : report.series) {
    out += fmt::format("{},{},{},{},{},{},{}\n", s.task, s.cls, s.points_in_range, s.mean, s.stddev, s.cv,
                       s.flagged ? 1 : 0);
  }
  return out;
}

std::string stationarity_windows_csv(const StationarityReport& report) {
  std::string out = "task,class,t_first,points,mean\n";
  for (const auto& s : report.series) {
    for (const auto& w : s.windows) {
      out += fmt::format("{},{},{},{},{}\n", s.task, s.cls, w.t_first, w.points, w.mean);
    }
  }
  return out;
}

}  // namespace metasched
