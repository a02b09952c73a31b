// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "metasched/artifacts.hpp"
#include "metasched/config.hpp"
#include "metasched/data.hpp"
#include "metasched/experiment.hpp"
#include "metasched/gittins.hpp"
#include "metasched/markov.hpp"
#include "metasched/mdp.hpp"
#include "metasched/regret.hpp"
#include "metasched/stationarity.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace metasched;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

Outcome gittins_equivalence() {
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 2 + static_cast<std::size_t>(trial % 5);
    const double beta = trial % 2 == 0 ? 0.5 : 0.9;
    const Matrix p = oracle::random_stochastic(c, rng);
    std::vector<double> r(c);
    for (auto& v : r) v = rng.uniform();
    const auto fast = gittins_compute(p, r, beta);
    const auto slow = oracle::gittins(p, r, beta);
    for (std::size_t s = 0; s < c; ++s) worst = std::max(worst, std::abs(fast.indices[s] - slow[s]));
  }
  return {worst <= 1e-6, fmt::format("100 chains, max |index - oracle| = {:.3g}", worst)};
}

Outcome bellman_consistency() {
  Rng rng(2002);
  double violation = 0.0;
  double residual = 0.0;
  double gap = 0.0;
  std::size_t largest = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t states = trial < 10 ? 64 : 1 + rng.index(64);
    const std::size_t actions = 1 + static_cast<std::size_t>(trial % 4);
    largest = std::max(largest, states);
    const auto mdp = oracle::random_mdp(states, actions, 0.9, rng);
    const auto v = mdp_solve_lp(mdp);
    const auto ref = oracle::value_iteration(mdp);
    violation = std::max(violation, lp_max_violation(mdp, v));
    residual = std::max(residual, bellman_residual(mdp, v));
    for (std::size_t s = 0; s < states; ++s) gap = std::max(gap, std::abs(v[s] - ref[s]));
  }
  return {violation <= 1e-9 && residual <= 1e-8 && gap <= 1e-6,
          fmt::format("50 MDPs up to {} states: LP violation {:.3g}, Bellman residual {:.3g}, |LP - VI| {:.3g}",
                      largest, violation, residual, gap)};
}

Outcome micro_instances() {
  std::vector<std::string> bad;
  const auto g = gittins_compute(Matrix{{0.5, 0.5}, {0.5, 0.5}}, std::vector<double>{1.0, 0.0}, 0.9);
  if (std::abs(g.indices[0] - 1.0) > 1e-6 || std::abs(g.indices[1] - 0.45) > 1e-6) bad.push_back("gittins");
  const auto pi = stationary_distribution(Matrix{{0.9, 0.1}, {0.5, 0.5}});
  if (std::abs(pi[0] - 5.0 / 6.0) > 1e-10 || std::abs(pi[1] - 1.0 / 6.0) > 1e-10) bad.push_back("stationary");
  const auto v = mdp_solve_lp(make_mdp(Matrix{{1.0}}, {Matrix{{1.0}}}, 0.9));
  if (std::abs(v[0] - 10.0) > 1e-9) bad.push_back("single-state value");
  const auto chi = chi_squared_independence(estimate_from_counts(2, {10, 0, 0, 10}));
  if (std::abs(chi.statistic - 20.0) > 1e-9 || chi.df != 1 || std::abs(chi.p_value - 7.74e-6) > 1e-8 ||
      !chi.reject_at_05) {
    bad.push_back("chi-squared");
  }
  return {bad.empty(), bad.empty() ? fmt::format("v = ({:.6f}, {:.6f}), pi = ({:.6f}, {:.6f}), V = {:.6f}, "
                                                 "chi2 = {:.3f} (df {}, p = {:.3g})",
                                                 g.indices[0], g.indices[1], pi[0], pi[1], v[0], chi.statistic,
                                                 chi.df, chi.p_value)
                                   : "mismatch: " + fmt::format("{}", fmt::join(bad, ", "))};
}

Outcome ucb_no_regret() {
  // Every gap to the best arm is at least 0.1; U = 1 is the usual constant
  // for rewards in [0, 1].
  const std::vector<double> means{0.9, 0.8, 0.7, 0.6, 0.5};
  constexpr std::size_t kHorizon = 10000;
  double avg_early = 0.0;
  double avg_late = 0.0;
  double best_share = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto run = oracle::run_ucb_bandit(means, kHorizon, seed, 1.0, 2.0);
    const auto regret = regret_trace(run.rewards, 0.9);
    avg_early += regret[999] / 1000.0 / 20.0;
    avg_late += regret[kHorizon - 1] / static_cast<double>(kHorizon) / 20.0;
    const auto tail_begin = run.arms.begin() + static_cast<std::ptrdiff_t>(kHorizon - kHorizon / 10);
    best_share += static_cast<double>(std::count(tail_begin, run.arms.end(), 0u)) / (kHorizon / 10.0) / 20.0;
  }
  return {avg_late < avg_early && best_share >= 0.8,
          fmt::format("R_T/T: {:.4f} at 1e3, {:.4f} at 1e4; best arm in last 10%: {:.1f}%", avg_early, avg_late,
                      100.0 * best_share)};
}

Outcome gradient_checks() {
  oracle::GradientCheck worst;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = oracle::check_gradients(oracle::random_gradient_instance(seed));
    worst.inner = std::max(worst.inner, c.inner);
    worst.meta_init = std::max(worst.meta_init, c.meta_init);
    worst.meta_log_step = std::max(worst.meta_log_step, c.meta_log_step);
  }
  return {worst.inner <= 1e-6 && worst.meta_init <= 1e-6 && worst.meta_log_step <= 1e-5,
          fmt::format("20 instances: inner {:.3g}, meta init {:.3g}, meta log-step {:.3g}", worst.inner,
                      worst.meta_init, worst.meta_log_step)};
}

Outcome reward_stationarity() {
  const auto config = parse_config(
      "data = synthetic\nscheduler = cyclic\nseed = 7\nbatch_size = 4\ninner_lr = 0.05\n"
      "synthetic.tasks = 2\nsynthetic.classes = 3\nsynthetic.dim = 4\nsynthetic.train_per_task = 600\n"
      "synthetic.val_per_task = 200\nsynthetic.diag = 0.8\nsynthetic.noise = 1.0\nsynthetic.separation = 2.0\n");
  std::vector<MetricsRecord> rows;
  (void)run_experiment(config, [&](const MetricsRecord& r) { rows.push_back(r); });
  const auto report = stationarity_report(rows);
  std::vector<std::string> cvs;
  for (const auto& s : report.series) cvs.push_back(fmt::format("{:.2f}", s.cv));
  const bool majority = 2 * report.stationary_count() > report.assessed_count();
  return {rows.size() >= 120 && majority,
          fmt::format("{} steps, {}/{} series with CV <= 0.3 (cv: {})", rows.size(), report.stationary_count(),
                      report.assessed_count(), fmt::join(cvs, " "))};
}

Outcome directional_efficiency() {
  const auto config = parse_config(
      "data = synthetic\nscheduler = cyclic\nseed = 1\nbatch_size = 4\nepochs = 1\ninner_lr = 0.05\n"
      "target_accuracy = 0.8\n"
      "synthetic.tasks = 3\nsynthetic.classes = 4\nsynthetic.dim = 24\nsynthetic.train_per_task = 300\n"
      "synthetic.val_per_task = 100\nsynthetic.diag = 0.8\nsynthetic.noise = 0.3, 1.2, 1.8\n"
      "synthetic.separation = 2.2\n");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const std::vector<SchedulerKind> kinds{SchedulerKind::Cyclic, SchedulerKind::Random, SchedulerKind::Ucb,
                                         SchedulerKind::Gittins, SchedulerKind::Mdp};
  const auto table = compare_schedulers(config, kinds, seeds);
  std::fputs(efficiency_text(table).c_str(), stdout);

  const auto reached = [](const EfficiencyRow& row) {
    return static_cast<double>(std::count_if(row.samples.begin(), row.samples.end(),
                                             [](const auto& s) { return s.has_value(); })) /
           static_cast<double>(row.samples.size());
  };
  const auto* gittins = table.find(SchedulerKind::Gittins);
  const auto* mdp = table.find(SchedulerKind::Mdp);
  const auto* ucb = table.find(SchedulerKind::Ucb);
  const auto* random = table.find(SchedulerKind::Random);
  const bool ok = gittins->ran && mdp->ran && gittins->ratio > 1.0 && mdp->ratio > 1.0 &&
                  reached(*gittins) >= 0.8 && reached(*mdp) >= 0.8 && ucb->ratio >= random->ratio;
  return {ok, fmt::format("ratios: gittins {:.3f}, mdp {:.3f}, ucb {:.3f}, random {:.3f}; "
                          "reached: gittins {:.0f}%, mdp {:.0f}%; per-seed wins over cyclic: gittins {:.0f}%, mdp {:.0f}%",
                          gittins->ratio, mdp->ratio, ucb->ratio, random->ratio, 100.0 * reached(*gittins),
                          100.0 * reached(*mdp), 100.0 * gittins->win_fraction, 100.0 * mdp->win_fraction)};
}

Outcome chi_squared_calibration() {
  Rng rng(8008);
  int sticky = 0;
  int iid = 0;
  const Matrix uniform(4, 4, 0.25);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Matrix p = oracle::random_diagonal_dominant(4, 0.7, rng);
    const auto a = chi_squared_independence(estimate_transitions(generate_markov_stream(p, 0, 1460, seed)));
    sticky += a.p_value < 0.05 ? 1 : 0;
    const auto b = chi_squared_independence(estimate_transitions(generate_markov_stream(uniform, 0, 1460, seed)));
    iid += b.p_value < 0.05 ? 1 : 0;
  }
  return {sticky >= 48 && iid <= 5,
          fmt::format("diagonal chains rejected in {}/50 seeds, i.i.d. streams in {}/50", sticky, iid)};
}

Outcome determinism_and_formats() {
  std::vector<std::string> bad;
  const fs::path golden = METASCHED_GOLDEN_DIR;
  const fs::path fixtures = METASCHED_FIXTURE_DIR;
  const auto base = fs::temp_directory_path() / "metasched_acceptance";
  fs::remove_all(base);

  const auto config = load_config(golden / "golden.conf");
  (void)run_experiment_to_dir(config, base / "a");
  (void)run_experiment_to_dir(config, base / "b");
  for (const char* f : {"metrics.csv", "summary.json"}) {
    if (read_text_file(base / "a" / f) != read_text_file(base / "b" / f)) bad.push_back(fmt::format("rerun {}", f));
    if (read_text_file(base / "a" / f) != read_text_file(golden / f)) bad.push_back(fmt::format("golden {}", f));
  }
  auto ucb = config;
  ucb.scheduler = SchedulerKind::Ucb;
  (void)run_experiment_to_dir(ucb, base / "c");
  (void)run_experiment_to_dir(ucb, base / "d");
  if (read_text_file(base / "c" / "metrics.csv") != read_text_file(base / "d" / "metrics.csv")) bad.push_back("ucb rerun");

  const auto idx = load_idx(fixtures / "tiny-images.idx", fixtures / "tiny-labels.idx");
  if (idx.features != std::vector<double>{0.0, 51.0 / 255.0, 204.0 / 255.0, 1.0} || idx.labels != std::vector<ClassId>{7}) {
    bad.push_back("idx fixture");
  }
  const auto csv = load_csv(fixtures / "three_rows.csv", {{"x1", "x2"}, "label", {}});
  if (csv.features != std::vector<double>{0.5, -1.25, 2.0, 3.75, -0.125, 0.0} ||
      csv.labels != std::vector<ClassId>{0, 1, 0}) {
    bad.push_back("csv fixture");
  }
  fs::remove_all(base);
  return {bad.empty(), bad.empty() ? "reruns byte-identical, golden metrics and summary match, IDX and CSV fixtures exact"
                                   : "mismatch: " + fmt::format("{}", fmt::join(bad, ", "))};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Gittins index matches calibration oracle", 60, gittins_equivalence},
      {2, "LP values satisfy Bellman consistency", 120, bellman_consistency},
      {3, "worked micro-instances", 10, micro_instances},
      {4, "UCB no-regret on a Bernoulli bandit", 60, ucb_no_regret},
      {5, "learner gradients match finite differences", 30, gradient_checks},
      {6, "sqrt(t) * e_t roughly constant", 60, reward_stationarity},
      {7, "Markov-aware schedulers beat cyclic", 600, directional_efficiency},
      {8, "chi-squared calibration", 60, chi_squared_calibration},
      {9, "determinism and file formats", 60, determinism_and_formats},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    fmt::print("{} [{}] {}: {} ({:.1f} s{})\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail, secs,
               in_time ? "" : fmt::format(", over the {:.0f} s limit", c.time_limit_s));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
