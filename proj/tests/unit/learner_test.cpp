#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "metasched/error.hpp"
#include "metasched/learner.hpp"
#include "metasched/random.hpp"
#include "oracles.hpp"

namespace metasched {
namespace {

ModelParams random_model(ModelShape shape, Rng& rng, double scale = 0.5) {
  std::vector<double> v(shape.param_count());
  for (auto& x : v) x = scale * rng.normal();
  return ModelParams(shape, std::move(v));
}

TEST(ModelShape, ParamCount) {
  EXPECT_EQ((ModelShape{3, 0, 4}).param_count(), 16u);
  EXPECT_EQ((ModelShape{3, 5, 4}).param_count(), 3u * 5 + 5 + 5 * 4 + 4);
}

TEST(ModelParams, RejectsBadShapes) {
  EXPECT_THROW(ModelParams(ModelShape{2, 0, 2}, std::vector<double>(5)), Error);
  EXPECT_THROW(ModelParams::zeros(ModelShape{2, kMaxHiddenUnits + 1, 2}), Error);
}

TEST(ModelParams, RandomIsSeeded) {
  const ModelShape shape{4, 3, 2};
  EXPECT_EQ(ModelParams::random(shape, 0.1, 9), ModelParams::random(shape, 0.1, 9));
  EXPECT_NE(ModelParams::random(shape, 0.1, 9), ModelParams::random(shape, 0.1, 10));
}

TEST(Forward, ZeroModelIsUniform) {
  const auto p = forward(ModelParams::zeros({3, 0, 4}), std::vector<double>{1.0, -2.0, 0.5});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Forward, SaturatesWithoutOverflow) {
  // W = [[1000], [-1000]] on x = 1.
  const ModelParams m({1, 0, 2}, {1000.0, -1000.0, 0.0, 0.0});
  const auto p = forward(m, std::vector<double>{1.0});
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(Forward, ShapeMismatch) {
  try {
    (void)forward(ModelParams::zeros({3, 0, 2}), std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Forward, MatchesScriptedSoftmax) {
  Rng rng(12);
  const ModelShape shape{4, 0, 3};
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(shape, rng);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.normal();
    const auto vals = m.values();
    const auto ref = oracle::softmax_forward(vals.subspan(0, 12), vals.subspan(12, 3), 3, x);
    const auto got = forward(m, x);
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(got[c], ref[c], 1e-12);
      EXPECT_GT(got[c], 0.0);
      sum += got[c];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Forward, HiddenLayerProbabilities) {
  Rng rng(13);
  const auto m = random_model({3, 5, 4}, rng, 2.0);
  const auto p = forward(m, std::vector<double>{0.3, -1.0, 2.0});
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
}

TEST(Loss, UniformPredictionsGiveLogC) {
  const auto ds = oracle::make_dataset(2, 5, {{1.0, 2.0}, {0.0, -1.0}}, {0, 3});
  EXPECT_NEAR(mean_loss(ModelParams::zeros({2, 0, 5}), ds.view()), std::log(5.0), 1e-12);
}

TEST(Loss, ConfidentCorrectModelHasTinyLossAndGradient) {
  const ModelParams m({1, 0, 2}, {50.0, -50.0, 0.0, 0.0});
  const auto ds = oracle::make_dataset(1, 2, {{1.0}, {2.0}}, {0, 0});
  const auto lg = loss_and_grad(m, ds.view());
  EXPECT_LT(lg.loss, 1e-20);
  EXPECT_LT(max_abs(lg.grad.params), 1e-20);
}

TEST(Loss, SoftmaxGradientMatchesHandDerivation) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_gradient_instance(2 * static_cast<std::uint64_t>(trial));
    const auto got = loss_and_grad(inst.model, inst.train.view()).grad.params;
    const auto ref = oracle::softmax_gradient(inst.model, inst.train.view());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);
  }
}

TEST(GradientCheck, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto check = oracle::check_gradients(oracle::random_gradient_instance(seed));
    EXPECT_LE(check.inner, 1e-6) << "seed " << seed;
    EXPECT_LE(check.meta_init, 1e-6) << "seed " << seed;
    EXPECT_LE(check.meta_log_step, 1e-5) << "seed " << seed;
  }
}

TEST(InnerStep, ZeroStepAndInputUnchanged) {
  Rng rng(15);
  const auto m = random_model({3, 0, 2}, rng);
  const auto copy = m;
  const auto ds = oracle::make_dataset(3, 2, {{1, 2, 3}}, {1});
  EXPECT_EQ(inner_sgd_step(m, ds.view(), 0.0), m);
  (void)inner_sgd_step(m, ds.view(), 0.5);
  EXPECT_EQ(m, copy);
}

TEST(InnerStep, OneDimensionalLogisticByHand) {
  // Two classes, w = (0, 0), b = (0, 0), x = 2, y = 0: p = (1/2, 1/2).
  // grad W = (p - y) x = (-1, 1), grad b = (-0.5, 0.5); step 0.1.
  const auto ds = oracle::make_dataset(1, 2, {{2.0}}, {0});
  const auto w = inner_sgd_step(ModelParams::zeros({1, 0, 2}), ds.view(), 0.1);
  const std::vector<double> expected{0.1, -0.1, 0.05, -0.05};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w.values()[i], expected[i], 1e-15);
}

TEST(InnerStep, SeparableTaskLearns) {
  Rng rng(16);
  Dataset ds;
  ds.dim = 2;
  ds.num_classes = 2;
  for (int i = 0; i < 200; ++i) {
    const ClassId y = rng.index(2);
    const double s = y == 0 ? -1.0 : 1.0;
    ds.append(std::vector<double>{s * 2.0 + 0.3 * rng.normal(), 0.3 * rng.normal()}, y);
  }
  auto w = ModelParams::zeros({2, 0, 2});
  for (int step = 0; step < 200; ++step) {
    const std::size_t i = static_cast<std::size_t>(step) % ds.size();
    w = inner_sgd_step(w, ds.view(i, i + 1), 0.1);
  }
  EXPECT_GE(oracle::softmax_accuracy(w, ds.view()), 0.95);
}

TEST(MetaUpdate, ZeroMetaStepIsIdentity) {
  const auto inst = oracle::random_gradient_instance(3);
  const Hyperparams lambda{inst.model, inst.log_step};
  const auto g = loss_and_grad(inst.model, inst.train.view()).grad.params;
  const auto stepped = inner_sgd_step(inst.model, inst.train.view(), lambda.inner_step());
  EXPECT_EQ(meta_update(lambda, {stepped, g}, inst.val.view(), 0.0), lambda);
}

TEST(MetaUpdate, ZeroValidationGradientIsIdentity) {
  // A confident correct model makes the validation gradient underflow to zero.
  const ModelParams m({1, 0, 2}, {800.0, -800.0, 0.0, 0.0});
  const auto val = oracle::make_dataset(1, 2, {{1.0}}, {0});
  const Hyperparams lambda{m, std::log(0.1)};
  const std::vector<double> g(4, 0.3);
  EXPECT_EQ(meta_update(lambda, {m, g}, val.view(), 0.5), lambda);
}

TEST(MetaUpdate, AppliesNegativeGradient) {
  const auto inst = oracle::random_gradient_instance(6);
  const Hyperparams lambda{inst.model, inst.log_step};
  const auto g = loss_and_grad(inst.model, inst.train.view()).grad.params;
  const auto stepped = inner_sgd_step(inst.model, inst.train.view(), lambda.inner_step());
  const auto mg = meta_gradient(lambda, {stepped, g}, inst.val.view());
  const auto next = meta_update(lambda, {stepped, g}, inst.val.view(), 0.2);
  for (std::size_t i = 0; i < mg.params.size(); ++i) {
    EXPECT_NEAR(next.init_params.values()[i], inst.model.values()[i] - 0.2 * mg.params[i], 1e-15);
  }
  EXPECT_NEAR(next.log_inner_step, inst.log_step - 0.2 * mg.log_inner_step, 1e-15);
}

TEST(MetaUpdate, ShapeMismatch) {
  const auto inst = oracle::random_gradient_instance(2);
  const Hyperparams lambda{inst.model, 0.0};
  EXPECT_THROW((void)meta_gradient(lambda, {inst.model, {1.0}}, inst.val.view()), Error);
}

}  // namespace
}  // namespace metasched
