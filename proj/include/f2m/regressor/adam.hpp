#pragma once

#include <cmath>
#include <cstdint>

#include "f2m/core/error.hpp"
#include "f2m/regressor/loss.hpp"
#include "f2m/regressor/mlp.hpp"

namespace f2m {

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 8;  // frames per optimizer step
  double lr0 = 1e-3;
  double lr_decay = 0.5;       // applied at every fifth of the run
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 5e-4;  // L2, folded into the gradient
  double eps = 1e-8;
  std::uint64_t seed = 0;
  // 0: train on every stored descriptor. Otherwise a fresh random subset of
  // this many descriptors per frame is drawn each epoch.
  std::size_t sample_per_frame = 0;

  void validate() const {
    if (batch_size < 1) throw Error(ErrorCode::InvalidInput, "batch_size must be >= 1");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error(ErrorCode::InvalidInput, "lr_decay must be in (0, 1]");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw Error(ErrorCode::InvalidInput, "Adam betas must be in [0, 1)");
    if (!(lr0 > 0.0)) throw Error(ErrorCode::InvalidInput, "lr0 must be positive");
    if (!(eps > 0.0) || !(weight_decay >= 0.0)) throw Error(ErrorCode::InvalidInput, "bad eps/weight_decay");
  }
};

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step = 0;

  static AdamState for_model(const MlpRegressor& model) {
    return {Gradients::zeros_like(model), Gradients::zeros_like(model), 0};
  }
};

/// Piecewise-constant schedule: lr0 * decay^floor(epoch / ceil(epochs / 5)).
inline double schedule_lr(std::size_t epoch, const TrainConfig& config) {
  const std::size_t period = std::max<std::size_t>(1, (config.epochs + 4) / 5);
  return config.lr0 * std::pow(config.lr_decay, static_cast<double>(epoch / period));
}

namespace detail {

template <typename Param, typename Grad>
void adam_update(Param& theta, const Grad& grad, Param& m, Param& v, double lr, double bc1, double bc2,
                 const TrainConfig& cfg) {
  auto th = theta.array();
  auto ma = m.array();
  auto va = v.array();
  const auto g = (grad.array() + cfg.weight_decay * th).eval();
  ma = cfg.beta1 * ma + (1.0 - cfg.beta1) * g;
  va = cfg.beta2 * va + (1.0 - cfg.beta2) * g.square();
  th -= lr * (ma / bc1) / ((va / bc2).sqrt() + cfg.eps);
}

}  // namespace detail

/// One bias-corrected Adam update in place. Weight decay is added to the
/// gradient (coupled L2), not applied to the parameters directly.
inline void adam_step(MlpRegressor& model, const Gradients& grads, AdamState& state, double lr,
                      const TrainConfig& config) {
  if (!(lr > 0.0)) throw Error(ErrorCode::InvalidInput, "learning rate must be positive");
  const std::size_t layers = model.num_layers();
  if (grads.weights.size() != layers || grads.biases.size() != layers ||
      state.first_moment.weights.size() != layers || state.second_moment.weights.size() != layers)
    throw Error(ErrorCode::InvalidInput, "gradient/optimizer state layer count mismatch");
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = model.weights[l];
    const auto& b = model.biases[l];
    auto same = [](const auto& a, const auto& c) { return a.rows() == c.rows() && a.cols() == c.cols(); };
    if (!same(grads.weights[l], w) || !same(grads.biases[l], b) || !same(state.first_moment.weights[l], w) ||
        !same(state.second_moment.weights[l], w) || !same(state.first_moment.biases[l], b) ||
        !same(state.second_moment.biases[l], b))
      throw Error(ErrorCode::InvalidInput, "gradient/optimizer state shape mismatch at layer " + std::to_string(l));
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t l = 0; l < layers; ++l) {
    detail::adam_update(model.weights[l], grads.weights[l], state.first_moment.weights[l],
                        state.second_moment.weights[l], lr, bc1, bc2, config);
    detail::adam_update(model.biases[l], grads.biases[l], state.first_moment.biases[l],
                        state.second_moment.biases[l], lr, bc1, bc2, config);
  }
}

}  // namespace f2m
