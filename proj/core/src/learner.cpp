#include "metasched/learner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metasched/error.hpp"
#include "metasched/random.hpp"

namespace metasched {

namespace {

constexpr double kLogFloor = 1e-12;

void check_input(const ModelShape& shape, std::size_t dim) {
  if (dim != shape.input_dim) {
    throw Error(ErrorCode::ShapeMismatch, "input dimension " + std::to_string(dim) +
                                              " but model expects " + std::to_string(shape.input_dim));
  }
}

void softmax_in_place(std::span<double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    sum += z;
  }
  for (double& z : logits) z /= sum;
}

// Writes the hidden activations (when present) and class probabilities.
void run_forward(const ModelShape& s, std::span<const double> w, std::span<const double> x,
                 std::span<double> hidden, std::span<double> probs) {
  const std::size_t d = s.input_dim;
  const std::size_t c = s.classes;
  if (!s.has_hidden()) {
    const double* bias = w.data() + c * d;
    for (std::size_t k = 0; k < c; ++k) {
      double z = bias[k];
      const double* row = w.data() + k * d;
      for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
      probs[k] = z;
    }
    softmax_in_place(probs);
    return;
  }
  const std::size_t h = s.hidden;
  const double* w1 = w.data();
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  const double* b2 = w2 + c * h;
  for (std::size_t u = 0; u < h; ++u) {
    double z = b1[u];
    const double* row = w1 + u * d;
    for (std::size_t j = 0; j < d; ++j) z += row[j] * x[j];
    hidden[u] = std::tanh(z);
  }
  for (std::size_t k = 0; k < c; ++k) {
    double z = b2[k];
    const double* row = w2 + k * h;
    for (std::size_t u = 0; u < h; ++u) z += row[u] * hidden[u];
    probs[k] = z;
  }
  softmax_in_place(probs);
}

}  // namespace

std::size_t ModelShape::param_count() const noexcept {
  if (!has_hidden()) return classes * input_dim + classes;
  return hidden * input_dim + hidden + classes * hidden + classes;
}

ModelParams::ModelParams(ModelShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape_.classes == 0 || shape_.input_dim == 0) {
    throw Error(ErrorCode::ShapeMismatch, "model needs at least one input and one class");
  }
  if (shape_.hidden > kMaxHiddenUnits) {
    throw Error(ErrorCode::ShapeMismatch, "hidden layer capped at 64 units");
  }
  if (values_.size() != shape_.param_count()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter vector length does not match shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite model parameter");
  }
}

ModelParams ModelParams::zeros(ModelShape shape) {
  return ModelParams(shape, std::vector<double>(shape.param_count(), 0.0));
}

ModelParams ModelParams::random(ModelShape shape, double scale, std::uint64_t seed) {
  std::vector<double> v(shape.param_count(), 0.0);
  Rng rng(seed);
  const std::size_t d = shape.input_dim;
  const std::size_t c = shape.classes;
  if (!shape.has_hidden()) {
    for (std::size_t i = 0; i < c * d; ++i) v[i] = scale * rng.normal();
  } else {
    const std::size_t h = shape.hidden;
    for (std::size_t i = 0; i < h * d; ++i) v[i] = scale * rng.normal();
    const std::size_t w2 = h * d + h;
    for (std::size_t i = 0; i < c * h; ++i) v[w2 + i] = scale * rng.normal();
  }
  return ModelParams(shape, std::move(v));
}

double Hyperparams::inner_step() const { return std::exp(log_inner_step); }

std::vector<double> forward(const ModelParams& model, std::span<const double> x) {
  const auto& s = model.shape();
  check_input(s, x.size());
  std::vector<double> hidden(s.hidden);
  std::vector<double> probs(s.classes);
  run_forward(s, model.values(), x, hidden, probs);
  return probs;
}

ClassId predict(const ModelParams& model, std::span<const double> x) {
  return argmax_tiebreak(forward(model, x));
}

LossAndGrad loss_and_grad(const ModelParams& model, const BatchView& batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyInput, "loss over an empty batch");
  const auto& s = model.shape();
  check_input(s, batch.dim);
  const std::size_t d = s.input_dim;
  const std::size_t c = s.classes;
  const std::size_t h = s.hidden;
  const auto w = model.values();

  LossAndGrad out;
  out.grad.params.assign(w.size(), 0.0);
  double* g = out.grad.params.data();
  std::vector<double> hidden(h);
  std::vector<double> probs(c);
  std::vector<double> delta_hidden(h);

  for (std::size_t n = 0; n < batch.size(); ++n) {
    const auto x = batch.x(n);
    const ClassId y = batch.labels[n];
    if (y >= c) throw Error(ErrorCode::ShapeMismatch, "label outside the model's class range");
    run_forward(s, w, x, hidden, probs);
    out.loss -= std::log(std::max(probs[y], kLogFloor));
    probs[y] -= 1.0;  // d loss / d logits

    if (!s.has_hidden()) {
      for (std::size_t k = 0; k < c; ++k) {
        double* row = g + k * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += probs[k] * x[j];
        g[c * d + k] += probs[k];
      }
      continue;
    }
    double* g_w1 = g;
    double* g_b1 = g_w1 + h * d;
    double* g_w2 = g_b1 + h;
    double* g_b2 = g_w2 + c * h;
    const double* w2 = w.data() + h * d + h;
    std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      for (std::size_t u = 0; u < h; ++u) {
        g_w2[k * h + u] += probs[k] * hidden[u];
        delta_hidden[u] += w2[k * h + u] * probs[k];
      }
      g_b2[k] += probs[k];
    }
    for (std::size_t u = 0; u < h; ++u) {
      const double pre = delta_hidden[u] * (1.0 - hidden[u] * hidden[u]);
      for (std::size_t j = 0; j < d; ++j) g_w1[u * d + j] += pre * x[j];
      g_b1[u] += pre;
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (double& v : out.grad.params) v *= inv;
  return out;
}

double mean_loss(const ModelParams& model, const BatchView& batch) {
  return loss_and_grad(model, batch).loss;
}

ModelParams inner_sgd_step(const ModelParams& w, const BatchView& batch, double step) {
  const auto lg = loss_and_grad(w, batch);
  std::vector<double> next(w.values().begin(), w.values().end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] -= step * lg.grad.params[i];
  return ModelParams(w.shape(), std::move(next));
}

Gradients meta_gradient(const Hyperparams& lambda, const InnerTrace& trace,
                        const BatchView& val_batch) {
  if (trace.final_weights.shape() != lambda.init_params.shape() ||
      trace.last_inner_grad.size() != lambda.init_params.values().size()) {
    throw Error(ErrorCode::ShapeMismatch, "inner trace does not match the hyperparameter shape");
  }
  Gradients g = loss_and_grad(trace.final_weights, val_batch).grad;
  g.log_inner_step = -lambda.inner_step() * dot(g.params, trace.last_inner_grad);
  return g;
}

Hyperparams meta_update(const Hyperparams& lambda, const InnerTrace& trace,
                        const BatchView& val_batch, double meta_step) {
  if (meta_step < 0.0) throw Error(ErrorCode::InvalidArgument, "meta step must be non-negative");
  const Gradients g = meta_gradient(lambda, trace, val_batch);
  std::vector<double> init(lambda.init_params.values().begin(), lambda.init_params.values().end());
  for (std::size_t i = 0; i < init.size(); ++i) init[i] -= meta_step * g.params[i];
  return {ModelParams(lambda.init_params.shape(), std::move(init)),
          lambda.log_inner_step - meta_step * g.log_inner_step};
}

}  // namespace metasched
