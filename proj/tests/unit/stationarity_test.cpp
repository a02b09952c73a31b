#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "metasched/artifacts.hpp"
#include "metasched/error.hpp"
#include "metasched/experiment.hpp"
#include "metasched/random.hpp"
#include "metasched/stationarity.hpp"

namespace fs = std::filesystem;

namespace metasched {
namespace {

// Metrics rows for one (task, class) series with error e(t) at t = 1..steps.
template <typename F>
std::vector<MetricsRecord> trace(std::size_t steps, F error) {
  std::vector<MetricsRecord> out;
  for (std::size_t t = 1; t <= steps; ++t) {
    const double e = error(t);
    out.push_back({1, t, 0, 0, 1.0 - e, scaled_reward(t, 1.0 - e), std::sqrt(static_cast<double>(t)) * e, 4 * t});
  }
  return out;
}

TEST(Stationarity, DecayingErrorIsFlat) {
  const auto rows = trace(150, [](std::size_t t) { return 0.6 / std::sqrt(static_cast<double>(t)); });
  const auto report = stationarity_report(rows);
  ASSERT_EQ(report.series.size(), 1u);
  const auto& s = report.series[0];
  EXPECT_EQ(s.points_in_range, 101u);
  EXPECT_NEAR(s.mean, 0.6, 1e-12);
  EXPECT_NEAR(s.cv, 0.0, 1e-12);
  EXPECT_FALSE(s.flagged);
  EXPECT_EQ(report.stationary_count(), 1u);
}

TEST(Stationarity, ConstantErrorIsFlaggedOverLongRange) {
  const auto rows = trace(1000, [](std::size_t) { return 0.2; });
  StationarityOptions opt;
  opt.t_end = 1000;
  const auto report = stationarity_report(rows, opt);
  EXPECT_GT(report.series[0].cv, 0.3);
  EXPECT_TRUE(report.series[0].flagged);
  EXPECT_EQ(report.stationary_count(), 0u);
  // The default range is short enough that sqrt(t) only varies by 2.4x.
  EXPECT_GT(stationarity_report(rows).series[0].cv, stationarity_report(trace(1000, [](std::size_t t) {
                                                                          return 0.6 / std::sqrt(static_cast<double>(t));
                                                                        })).series[0].cv);
}

TEST(Stationarity, TooFewSteps) {
  try {
    (void)stationarity_report(trace(49, [](std::size_t) { return 0.1; }));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSteps);
  }
}

TEST(Stationarity, SeriesSplitByTaskAndClass) {
  std::vector<MetricsRecord> rows;
  for (std::size_t t = 1; t <= 60; ++t) {
    rows.push_back({1, t, t % 2, (t / 2) % 3, 0.5, 0.0, std::sqrt(static_cast<double>(t)) * 0.5, t});
  }
  const auto report = stationarity_report(rows);
  std::size_t total = 0;
  for (std::size_t i = 0; i < report.series.size(); ++i) {
    total += report.series[i].values.size();
    if (i > 0) {
      const auto& a = report.series[i - 1];
      const auto& b = report.series[i];
      EXPECT_TRUE(a.task < b.task || (a.task == b.task && a.cls < b.cls));
    }
  }
  EXPECT_EQ(total, 60u);
}

TEST(Stationarity, WindowsAndCsv) {
  const auto report = stationarity_report(trace(55, [](std::size_t t) { return 1.0 / static_cast<double>(t); }));
  const auto& w = report.series[0].windows;
  ASSERT_EQ(w.size(), 6u);
  EXPECT_EQ(w[0].t_first, 1u);
  EXPECT_EQ(w[5].t_first, 51u);
  EXPECT_EQ(w[5].points, 5u);
  double m = 0.0;
  for (std::size_t t = 1; t <= 10; ++t) m += 1.0 / std::sqrt(static_cast<double>(t));
  EXPECT_NEAR(w[0].mean, m / 10.0, 1e-14);
  EXPECT_EQ(stationarity_summary_csv(report).substr(0, 40), "task,class,points,mean,stddev,cv,flagged");
  const auto series = stationarity_series_csv(report);
  EXPECT_EQ(std::count(series.begin(), series.end(), '\n'), 56);
}

// Small digit-like IDX pair: three 4x4 glyphs with pixel noise, labels from a
// sticky chain so the two contiguous task blocks carry Markov structure.
void write_digit_fixture(const fs::path& dir, std::size_t count) {
  const std::uint8_t glyphs[3][16] = {
      {0, 255, 255, 0, 0, 255, 255, 0, 0, 255, 255, 0, 0, 255, 255, 0},
      {255, 255, 255, 255, 0, 0, 0, 0, 0, 0, 0, 0, 255, 255, 255, 255},
      {255, 0, 0, 255, 0, 255, 255, 0, 0, 255, 255, 0, 255, 0, 0, 255}};
  Rng rng(31);
  std::vector<std::uint8_t> labels = {0, 0, 8, 1};
  std::vector<std::uint8_t> images = {0, 0, 8, 3};
  const auto be32 = [](std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  };
  be32(labels, static_cast<std::uint32_t>(count));
  be32(images, static_cast<std::uint32_t>(count));
  be32(images, 4);
  be32(images, 4);
  std::uint8_t y = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (rng.uniform() > 0.8) y = static_cast<std::uint8_t>(rng.index(3));
    labels.push_back(y);
    for (auto g : glyphs[y]) {
      const double v = g + 160.0 * rng.normal();
      images.push_back(static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
    }
  }
  fs::create_directories(dir);
  std::ofstream(dir / "images.idx", std::ios::binary).write(reinterpret_cast<const char*>(images.data()), images.size());
  std::ofstream(dir / "labels.idx", std::ios::binary).write(reinterpret_cast<const char*>(labels.data()), labels.size());
}

TEST(Stationarity, DigitRunMatchesSpreadsheetRecomputation) {
  const auto dir = fs::temp_directory_path() / "metasched_stationarity_digits";
  fs::remove_all(dir);
  write_digit_fixture(dir, 300);
  const auto c = parse_config("data = idx\nscheduler = cyclic\nseed = 4\nbatch_size = 1\ninner_lr = 0.05\n"
                              "idx.tasks = 2\nidx.images = " + (dir / "images.idx").string() +
                              "\nidx.labels = " + (dir / "labels.idx").string() + "\n");
  (void)run_experiment_to_dir(c, dir / "run");

  const std::string text = read_text_file(dir / "run" / "metrics.csv");
  const auto report = stationarity_report(read_metrics_csv(dir / "run" / "metrics.csv"));

  // Column-by-column recomputation from the raw text.
  std::map<std::pair<int, int>, std::vector<double>> cells;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    const int t = std::stoi(f[1]);
    if (t >= 20 && t <= 120) cells[{std::stoi(f[2]), std::stoi(f[3])}].push_back(std::stod(f[6]));
  }
  std::size_t matched = 0;
  for (const auto& s : report.series) {
    const auto it = cells.find({static_cast<int>(s.task), static_cast<int>(s.cls)});
    if (it == cells.end() || it->second.size() < 2) {
      EXPECT_TRUE(std::isnan(s.cv));
      continue;
    }
    const auto& v = it->second;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.stddev, sd, 1e-12);
    if (mean != 0.0) {
      EXPECT_NEAR(s.cv, sd / std::abs(mean), 1e-12);
    }
    ++matched;
  }
  EXPECT_GT(matched, 0u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace metasched
