#include <gtest/gtest.h>

#include <filesystem>

#include "metasched/artifacts.hpp"
#include "metasched/error.hpp"
#include "metasched/random.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace metasched {
namespace {

ErrorCode parse_code(void (*f)()) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

TEST(Artifacts, RewardTableRoundTrip) {
  const RewardTable t{Matrix{{0.1, 1.0 / 3.0}, {2e-17, 0.999999999999}}};
  EXPECT_EQ(reward_table_from_json(reward_table_to_json(t)).values, t.values);
}

TEST(Artifacts, GittinsRoundTrip) {
  Rng rng(1);
  std::vector<Matrix> ps{oracle::random_stochastic(3, rng), oracle::random_stochastic(3, rng)};
  const RewardTable r{Matrix{{0.1, 0.2, 0.3}, {0.6, 0.5, 0.4}}};
  const auto table = gittins_tables(ps, r, 0.85);
  const auto back = gittins_from_json(gittins_to_json(table));
  EXPECT_EQ(back.beta, table.beta);
  EXPECT_EQ(back.indices, table.indices);
  EXPECT_EQ(back.orderings, table.orderings);
}

TEST(Artifacts, MdpValuesRoundTrip) {
  Rng rng(2);
  std::vector<Matrix> ps{oracle::random_stochastic(2, rng), oracle::random_stochastic(3, rng)};
  const RewardTable r{Matrix{{0.1, 0.2, 0.0}, {0.6, 0.5, 0.4}}};
  auto mdp = mdp_build(std::vector<Matrix>{ps[0], ps[0]}, RewardTable{Matrix{{0.1, 0.2}, {0.6, 0.5}}}, 0.9);
  mdp.values = mdp_solve_lp(mdp);
  const auto back = mdp_values_from_json(mdp_values_to_json(mdp));
  EXPECT_EQ(back.gamma, 0.9);
  EXPECT_EQ(back.state_dims, mdp.state_dims);
  EXPECT_EQ(back.values, mdp.values);
}

TEST(Artifacts, ModelAndHyperparamsRoundTrip) {
  const auto m = ModelParams::random({3, 4, 2}, 0.7, 5);
  EXPECT_EQ(model_from_json(model_to_json(m)), m);
  const Hyperparams h{ModelParams::random({2, 0, 3}, 0.1, 6), -2.302585092994046};
  EXPECT_EQ(hyperparams_from_json(hyperparams_to_json(h)), h);
}

TEST(Artifacts, RejectsWrongKindAndBadJson) {
  EXPECT_EQ(parse_code([] {
              (void)gittins_from_json(reward_table_to_json(RewardTable{Matrix{{0.5}}}));
            }),
            ErrorCode::ParseError);
  EXPECT_EQ(parse_code([] { (void)model_from_json("{not json"); }), ErrorCode::ParseError);
}

TEST(Artifacts, TextFiles) {
  const auto dir = fs::temp_directory_path() / "metasched_artifacts_test" / "nested";
  fs::remove_all(dir.parent_path());
  write_text_file(dir / "a.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "a.txt"), "hello\n");
  fs::remove_all(dir.parent_path());
  EXPECT_EQ(parse_code([] { (void)read_text_file("/nonexistent/metasched/file"); }), ErrorCode::Io);
}

}  // namespace
}  // namespace metasched
