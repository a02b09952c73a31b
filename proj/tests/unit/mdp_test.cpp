#include <gtest/gtest.h>

#include <vector>

#include "metasched/error.hpp"
#include "metasched/mdp.hpp"
#include "metasched/random.hpp"
#include "oracles.hpp"

namespace metasched {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

// State 1 pays 1 forever. In state 0, action 0 stays for 0.5, action 1 jumps
// to state 1 for nothing. V(1) = 10, V(0) = max(0.5 / 0.1, 0.9 * 10) = 9.
MdpPolicy teleport() {
  return make_mdp(Matrix{{0.5, 0.0}, {1.0, 1.0}}, {Matrix{{1, 0}, {0, 1}}, Matrix{{0, 1}, {0, 1}}}, 0.9);
}

TEST(Mdp, SingleState) {
  const auto mdp = make_mdp(Matrix{{1.0}}, {Matrix{{1.0}}}, 0.9);
  EXPECT_NEAR(mdp_solve_lp(mdp)[0], 10.0, 1e-10);
  EXPECT_NEAR(mdp_value_iteration(mdp, 1e-9)[0], 10.0, 1e-9);
}

TEST(Mdp, ZeroRewards) {
  Rng rng(1);
  auto mdp = oracle::random_mdp(6, 3, 0.9, rng);
  mdp.rewards = Matrix(6, 3, 0.0);
  for (double v : mdp_solve_lp(mdp)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Mdp, TeleportByHand) {
  const auto mdp = teleport();
  const auto lp = mdp_solve_lp(mdp);
  EXPECT_NEAR(lp[0], 9.0, 1e-10);
  EXPECT_NEAR(lp[1], 10.0, 1e-10);
  const auto vi = mdp_value_iteration(mdp, 1e-10);
  EXPECT_NEAR(vi[0], 9.0, 1e-10);
  auto solved = mdp;
  solved.values = lp;
  const ClassId s0[] = {0};
  EXPECT_EQ(mdp_select(solved, s0), 1u);
}

TEST(Mdp, MakeValidates) {
  EXPECT_EQ(code_of([] { (void)make_mdp(Matrix{{1.0}}, {Matrix{{0.5}}}, 0.9); }), ErrorCode::NotStochastic);
  EXPECT_THROW((void)make_mdp(Matrix{{1.0}}, {Matrix{{1.0}}}, 1.0), Error);
  EXPECT_THROW((void)make_mdp(Matrix{{1.0, 2.0}}, {Matrix{{1.0}}}, 0.5), Error);
}

TEST(MdpBuild, SingleTaskIsItsChain) {
  const Matrix p{{0.2, 0.8}, {0.6, 0.4}};
  RewardTable r{Matrix{{0.3, 0.7}}};
  const std::vector<Matrix> ps{p};
  const auto mdp = mdp_build(ps, r, 0.9);
  ASSERT_EQ(mdp.num_actions(), 1u);
  EXPECT_EQ(mdp.transitions[0], p);
  EXPECT_EQ(mdp.rewards(1, 0), 0.7);
}

TEST(MdpBuild, PermutationInSlotZero) {
  const std::vector<Matrix> ps{Matrix{{0, 1}, {1, 0}}, Matrix{{0.5, 0.5}, {0.5, 0.5}}};
  RewardTable r{Matrix{{0.1, 0.2}, {0.3, 0.4}}};
  const auto mdp = mdp_build(ps, r, 0.9);
  ASSERT_EQ(mdp.num_states(), 4u);
  for (ClassId c0 = 0; c0 < 2; ++c0) {
    for (ClassId c1 = 0; c1 < 2; ++c1) {
      const std::vector<ClassId> from{c0, c1};
      const std::vector<ClassId> to{1 - c0, c1};
      const auto s = encode_state(mdp.state_dims, from);
      EXPECT_EQ(s, c0 * 2 + c1);
      for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_EQ(mdp.transitions[0](s, t), t == encode_state(mdp.state_dims, to) ? 1.0 : 0.0);
      }
      EXPECT_EQ(mdp.rewards(s, 0), r(0, c0));
      EXPECT_EQ(mdp.rewards(s, 1), r(1, c1));
    }
  }
  EXPECT_EQ(mdp.transitions[0], kron(ps[0], Matrix::identity(2)));
  EXPECT_EQ(mdp.transitions[1], kron(Matrix::identity(2), ps[1]));
}

TEST(MdpBuild, RandomBuildsAreStochastic) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(3);
    std::vector<Matrix> ps;
    RewardTable r{Matrix(n, 3)};
    for (std::size_t i = 0; i < n; ++i) {
      ps.push_back(oracle::random_stochastic(3, rng));
      for (std::size_t c = 0; c < 3; ++c) r.values(i, c) = rng.uniform();
    }
    const auto mdp = mdp_build(ps, r, 0.9);
    for (const auto& t : mdp.transitions) EXPECT_LE(max_row_sum_deviation(t), 1e-12);
  }
}

TEST(MdpBuild, StateCap) {
  const std::vector<Matrix> ps(3, Matrix(4, 4, 0.25));
  RewardTable r{Matrix(3, 4, 0.5)};
  EXPECT_EQ(code_of([&] { (void)mdp_build(ps, r, 0.9, 63); }), ErrorCode::StateSpaceTooLarge);
  EXPECT_NO_THROW((void)mdp_build(ps, r, 0.9, 64));
}

TEST(MdpState, EncodeDecodeRoundTrip) {
  const std::vector<std::size_t> dims{3, 2, 4};
  for (std::size_t s = 0; s < 24; ++s) EXPECT_EQ(encode_state(dims, decode_state(dims, s)), s);
  EXPECT_EQ(encode_state(dims, std::vector<ClassId>{2, 1, 3}), 23u);
}

TEST(MdpSolve, AgreesWithValueIterationOracle) {
  Rng rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t s = 1 + rng.index(40);
    const std::size_t a = 1 + rng.index(4);
    const auto mdp = oracle::random_mdp(s, a, 0.9, rng);
    const auto lp = mdp_solve_lp(mdp);
    const auto ref = oracle::value_iteration(mdp);
    for (std::size_t i = 0; i < s; ++i) EXPECT_NEAR(lp[i], ref[i], 1e-6);
    EXPECT_LE(lp_max_violation(mdp, lp), 1e-9);
    EXPECT_LE(bellman_residual(mdp, lp), 1e-8);
  }
}

TEST(MdpValueIteration, ErrorBoundedByTolerance) {
  Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mdp = oracle::random_mdp(10, 3, 0.9, rng);
    const auto ref = oracle::value_iteration(mdp);
    for (double tol : {1e-3, 1e-6, 1e-10}) {
      const auto v = mdp_value_iteration(mdp, tol);
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LE(std::abs(v[i] - ref[i]), tol);
    }
    EXPECT_LE(bellman_residual(mdp, mdp_value_iteration(mdp, 1e-10)), 1e-8);
  }
}

TEST(MdpSelect, MatchesBruteForceQ) {
  Rng rng(46);
  const std::vector<Matrix> ps{oracle::random_stochastic(2, rng), oracle::random_stochastic(2, rng)};
  RewardTable r{Matrix{{0.2, 0.9}, {0.6, 0.4}}};
  auto mdp = mdp_build(ps, r, 0.9);
  mdp.values = mdp_solve_lp(mdp);
  const auto v = oracle::value_iteration(mdp);
  for (ClassId c0 = 0; c0 < 2; ++c0) {
    for (ClassId c1 = 0; c1 < 2; ++c1) {
      const std::vector<ClassId> labels{c0, c1};
      const std::size_t s = c0 * 2 + c1;
      double q[2];
      for (std::size_t a = 0; a < 2; ++a) {
        q[a] = r(a, labels[a]);
        for (ClassId n0 = 0; n0 < 2; ++n0) {
          for (ClassId n1 = 0; n1 < 2; ++n1) {
            const double p = a == 0 ? ps[0](c0, n0) * (n1 == c1) : ps[1](c1, n1) * (n0 == c0);
            q[a] += 0.9 * p * v[n0 * 2 + n1];
          }
        }
        EXPECT_NEAR(q_value(mdp, mdp.values, s, a), q[a], 1e-8);
      }
      EXPECT_EQ(mdp_select(mdp, labels), q[1] > q[0] + 1e-9 ? 1u : 0u);
      const bool only1[] = {false, true};
      EXPECT_EQ(mdp_select(mdp, labels, only1), 1u);
    }
  }
}

TEST(MdpSelect, DominantRewardAndSingleAction) {
  const Matrix same{{0.5, 0.5}, {0.5, 0.5}};
  auto mdp = make_mdp(Matrix{{0.1, 0.8}, {0.1, 0.8}}, {same, same}, 0.9);
  mdp.values = mdp_solve_lp(mdp);
  const ClassId s[] = {1};
  EXPECT_EQ(mdp_select(mdp, s), 1u);
  const bool none[] = {false, false};
  EXPECT_EQ(code_of([&] { (void)mdp_select(mdp, s, none); }), ErrorCode::AllExhausted);

  auto single = make_mdp(Matrix{{0.3}, {0.9}}, {same}, 0.9);
  single.values = mdp_solve_lp(single);
  EXPECT_EQ(mdp_select(single, s), 0u);
}

}  // namespace
}  // namespace metasched
