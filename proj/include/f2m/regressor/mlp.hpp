#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "f2m/core/error.hpp"
#include "f2m/core/types.hpp"

namespace f2m {

/// Shared-weights perceptron applied independently to every descriptor of a
/// set. Layer l maps layer_dims[l] -> layer_dims[l+1]; ReLU follows every
/// layer except the last, whose output is the 3D scene coordinate.
template <typename Scalar>
struct BasicMlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;  // out x in
  std::vector<Vector> biases;

  BasicMlp() = default;

  /// Zero-initialized network with the given dimensions.
  explicit BasicMlp(std::vector<std::size_t> dims) : layer_dims(std::move(dims)) {
    if (layer_dims.size() < 2)
      throw Error(ErrorCode::InvalidInput, "a network needs at least an input and an output dimension");
    if (layer_dims.back() != 3)
      throw Error(ErrorCode::InvalidInput, "the last layer must produce 3 outputs");
    for (auto d : layer_dims)
      if (d == 0) throw Error(ErrorCode::InvalidInput, "layer dimensions must be positive");
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
      weights.push_back(Matrix::Zero(layer_dims[l + 1], layer_dims[l]));
      biases.push_back(Vector::Zero(layer_dims[l + 1]));
    }
  }

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }

  void validate() const {
    if (layer_dims.size() < 2 || layer_dims.back() != 3)
      throw Error(ErrorCode::InvalidInput, "malformed layer dimensions");
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
      throw Error(ErrorCode::InvalidInput, "layer count does not match layer dimensions");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(layer_dims[l]);
      const auto out = static_cast<Eigen::Index>(layer_dims[l + 1]);
      if (weights[l].rows() != out || weights[l].cols() != in || biases[l].size() != out)
        throw Error(ErrorCode::InvalidInput, "parameter shape mismatch at layer " + std::to_string(l));
    }
  }

  template <typename Other>
  BasicMlp<Other> cast() const {
    BasicMlp<Other> out;
    out.layer_dims = layer_dims;
    for (const auto& w : weights) out.weights.push_back(w.template cast<Other>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<Other>());
    return out;
  }

  bool operator==(const BasicMlp& other) const {
    if (layer_dims != other.layer_dims || weights.size() != other.weights.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l)
      if (weights[l] != other.weights[l] || biases[l] != other.biases[l]) return false;
    return true;
  }
};

using MlpRegressor = BasicMlp<double>;

namespace presets {

inline const std::vector<std::size_t> kFullHidden{512, 1024, 1024, 512};
inline const std::vector<std::size_t> kTinyHidden{512, 512, 512, 128};

inline std::vector<std::size_t> with_input(std::size_t input_dim, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(3);
  return dims;
}

/// (M, 512, 1024, 1024, 512, 3); M = 256 for SuperPoint-sized descriptors.
inline std::vector<std::size_t> full(std::size_t input_dim = 256) { return with_input(input_dim, kFullHidden); }

/// (M, 512, 512, 512, 128, 3).
inline std::vector<std::size_t> tiny(std::size_t input_dim = 256) { return with_input(input_dim, kTinyHidden); }

}  // namespace presets

/// Number of learnable parameters: sum over layers of in*out + out.
inline std::size_t param_count(const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
  return n;
}

template <typename Scalar>
std::size_t param_count(const BasicMlp<Scalar>& model) {
  return param_count(model.layer_dims);
}

/// Weights uniform in +-1/sqrt(fan_in), zero biases. Layers are filled in
/// order, each weight matrix row by row, from one seeded stream.
inline MlpRegressor init_uniform(std::vector<std::size_t> dims, std::uint64_t seed) {
  MlpRegressor model(std::move(dims));
  std::mt19937_64 rng(seed);
  for (auto& w : model.weights) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
  }
  return model;
}

inline constexpr Eigen::Index kColumnPanel = 16;

/// Applies the shared map to every column of `inputs` (input_dim x k).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, Eigen::Dynamic> forward(
    const BasicMlp<Scalar>& model,
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& inputs) {
  using Matrix = typename BasicMlp<Scalar>::Matrix;
  if (model.weights.empty()) throw Error(ErrorCode::InvalidInput, "empty network");
  if (inputs.rows() != static_cast<Eigen::Index>(model.input_dim()))
    throw Error(ErrorCode::InvalidInput, "descriptor dimension " + std::to_string(inputs.rows()) +
                                             " does not match network input " +
                                             std::to_string(model.input_dim()));
  if (inputs.cols() == 0) return Eigen::Matrix<Scalar, 3, Eigen::Dynamic>(3, 0);

  // The GEMM kernel evaluates trailing columns of a panel through a
  // different code path; padding to whole panels keeps every descriptor's
  // result bit-identical regardless of its position in the set.
  const Eigen::Index k = inputs.cols();
  const Eigen::Index padded = (k + kColumnPanel - 1) / kColumnPanel * kColumnPanel;
  Matrix act;
  if (padded != k) {
    act = Matrix::Zero(inputs.rows(), padded);
    act.leftCols(k) = inputs;
  }
  Matrix next;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    if (l == 0 && padded == k)
      next.noalias() = model.weights[l] * inputs;
    else
      next.noalias() = model.weights[l] * act;
    if (l + 1 < model.num_layers())
      next = (next.colwise() + model.biases[l]).cwiseMax(Scalar(0));
    else
      next.colwise() += model.biases[l];
    act.swap(next);
  }
  return act.leftCols(k);
}

/// Scene coordinates for every descriptor of a frame.
template <typename Scalar>
SceneCoordinates forward(const BasicMlp<Scalar>& model, const DescriptorSet& frame) {
  frame.check();
  if (frame.size() == 0) {
    if (frame.dim() != 0 && frame.dim() != model.input_dim())
      throw Error(ErrorCode::InvalidInput, "descriptor dimension does not match network input");
    return SceneCoordinates(3, 0);
  }
  if constexpr (std::is_same_v<Scalar, float>) {
    return forward<float>(model, frame.descriptors).template cast<double>();
  } else {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> in = frame.descriptors.cast<Scalar>();
    return forward<Scalar>(model, in).template cast<double>();
  }
}

}  // namespace f2m
