#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metasched/data.hpp"

namespace metasched {

/// hidden == 0 selects a linear softmax classifier; otherwise one tanh layer.
struct ModelShape {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;

  bool has_hidden() const noexcept { return hidden > 0; }
  std::size_t param_count() const noexcept;
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

inline constexpr std::size_t kMaxHiddenUnits = 64;

/// Flat parameter vector. Layout:
///   softmax: W (C x D), b (C)
///   hidden:  W1 (H x D), b1 (H), W2 (C x H), b2 (C)
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(ModelShape shape, std::vector<double> values);

  static ModelParams zeros(ModelShape shape);
  /// Weights ~ N(0, scale^2), biases zero.
  static ModelParams random(ModelShape shape, double scale, std::uint64_t seed);

  const ModelShape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ModelShape shape_;
  std::vector<double> values_;
};

struct Hyperparams {
  ModelParams init_params;
  double log_inner_step = 0.0;

  double inner_step() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct Gradients {
  std::vector<double> params;       // shaped like ModelParams::values()
  double log_inner_step = 0.0;      // meta gradients only
};

struct LossAndGrad {
  double loss = 0.0;
  Gradients grad;
};

/// Softmax class probabilities. Throws ShapeMismatch on a dimension mismatch.
std::vector<double> forward(const ModelParams& model, std::span<const double> x);

/// Predicted class (argmax of forward, lowest index on ties).
ClassId predict(const ModelParams& model, std::span<const double> x);

/// Mean cross-entropy over the batch and its exact gradient.
LossAndGrad loss_and_grad(const ModelParams& model, const BatchView& batch);
double mean_loss(const ModelParams& model, const BatchView& batch);

/// w' = w - step * grad(mean batch loss).
ModelParams inner_sgd_step(const ModelParams& w, const BatchView& batch, double step);

/// What the meta step needs from the inner loop: the final weights and the
/// gradient that produced them (taken at the weights before the last step).
struct InnerTrace {
  ModelParams final_weights;
  std::vector<double> last_inner_grad;
};

/// First-order meta gradient. The init-weight part is the validation gradient
/// at the final weights; the log-step part is -step * <g_val, g_last>, the
/// chain rule through the last inner update.
Gradients meta_gradient(const Hyperparams& lambda, const InnerTrace& trace,
                        const BatchView& val_batch);

Hyperparams meta_update(const Hyperparams& lambda, const InnerTrace& trace,
                        const BatchView& val_batch, double meta_step);

}  // namespace metasched
