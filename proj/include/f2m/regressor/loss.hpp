#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "f2m/core/error.hpp"
#include "f2m/core/types.hpp"
#include "f2m/regressor/mlp.hpp"

namespace f2m {

/// Residual norms below this are treated as exact hits: the norm's
/// subgradient there is taken to be zero.
inline constexpr double kZeroResidual = 1e-12;

namespace detail {

inline void check_loss_inputs(Eigen::Index n_pred, Eigen::Index n_gt, std::size_t n_valid_flags) {
  if (n_pred != n_gt || static_cast<std::size_t>(n_pred) != n_valid_flags)
    throw Error(ErrorCode::InvalidInput, "prediction, ground truth and validity lengths differ");
}

}  // namespace detail

/// Mean Euclidean distance between predicted and ground-truth coordinates,
/// taken over the valid entries only.
inline double coordinate_loss(const SceneCoordinates& pred, const SceneCoordinates& gt,
                              std::span<const std::uint8_t> validity) {
  detail::check_loss_inputs(pred.cols(), gt.cols(), validity.size());
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < pred.cols(); ++i) {
    if (!validity[static_cast<std::size_t>(i)]) continue;
    sum += (pred.col(i) - gt.col(i)).norm();
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::DegenerateInput, "no valid ground-truth entries in batch");
  return sum / static_cast<double>(n);
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Gradients zeros_like(const MlpRegressor& model) {
    Gradients g;
    for (const auto& w : model.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : model.biases) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
    return g;
  }
};

struct LossGradient {
  double loss = 0.0;
  std::size_t valid = 0;
  Gradients grads;
};

/// Exact gradient of coordinate_loss w.r.t. every weight and bias.
/// `inputs` holds one descriptor per column.
inline LossGradient backward(const MlpRegressor& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                             const SceneCoordinates& gt, std::span<const std::uint8_t> validity) {
  model.validate();
  detail::check_loss_inputs(inputs.cols(), gt.cols(), validity.size());
  if (inputs.rows() != static_cast<Eigen::Index>(model.input_dim()))
    throw Error(ErrorCode::InvalidInput, "descriptor dimension does not match network input");

  const std::size_t layers = model.num_layers();
  std::vector<Eigen::MatrixXd> acts(layers + 1);  // acts[l] is the input of layer l
  // Same column padding as forward() so both produce identical predictions;
  // padded columns carry no label.
  const Eigen::Index k = inputs.cols();
  const Eigen::Index padded = (k + kColumnPanel - 1) / kColumnPanel * kColumnPanel;
  acts[0] = Eigen::MatrixXd::Zero(inputs.rows(), padded);
  acts[0].leftCols(k) = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    acts[l + 1].noalias() = model.weights[l] * acts[l];
    acts[l + 1].colwise() += model.biases[l];
    if (l + 1 < layers) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }

  LossGradient out;
  const Eigen::MatrixXd& pred = acts[layers];
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(3, pred.cols());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!validity[static_cast<std::size_t>(i)]) continue;
    const Eigen::Vector3d r = pred.col(i) - gt.col(i);
    const double norm = r.norm();
    sum += norm;
    ++out.valid;
    if (norm >= kZeroResidual) delta.col(i) = r / norm;
  }
  if (out.valid == 0) throw Error(ErrorCode::DegenerateInput, "no valid ground-truth entries in batch");
  out.loss = sum / static_cast<double>(out.valid);
  delta /= static_cast<double>(out.valid);

  out.grads.weights.resize(layers);
  out.grads.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    out.grads.weights[l].noalias() = delta * acts[l].transpose();
    out.grads.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd prev;
    prev.noalias() = model.weights[l].transpose() * delta;
    // ReLU derivative: pass-through where the activation was positive.
    delta = (acts[l].array() > 0.0).select(prev, 0.0);
  }
  return out;
}

}  // namespace f2m
