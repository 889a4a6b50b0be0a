#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "f2m/core/error.hpp"

namespace f2m {

using Matrix2Xf = Eigen::Matrix<float, 2, Eigen::Dynamic>;
using Matrix3Xf = Eigen::Matrix<float, 3, Eigen::Dynamic>;
using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Ground-truth scene coordinates attached to a frame. Entries whose
/// validity flag is zero carry no label and are ignored by the loss.
struct GroundTruthCoords {
  Matrix3Xf coords;
  std::vector<std::uint8_t> validity;

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : validity) n += v != 0;
    return n;
  }
};

/// Sparse features of one image. Column i of every matrix belongs to
/// keypoint i; descriptors are stored one per column (M x k).
struct DescriptorSet {
  std::string frame_id;
  Matrix2Xf keypoints;
  Eigen::VectorXf scores;
  Eigen::MatrixXf descriptors;
  std::optional<GroundTruthCoords> gt;

  std::size_t size() const { return static_cast<std::size_t>(keypoints.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(descriptors.rows()); }

  /// Throws InvalidInput when the per-keypoint arrays disagree in length.
  void check() const {
    const auto k = keypoints.cols();
    if (scores.size() != k || descriptors.cols() != k)
      throw Error(ErrorCode::InvalidInput,
                  "frame '" + frame_id + "': keypoint/score/descriptor lengths differ");
    if (k > 0 && descriptors.rows() == 0)
      throw Error(ErrorCode::InvalidInput, "frame '" + frame_id + "': descriptor dimension is zero");
    if (gt && (gt->coords.cols() != k || static_cast<Eigen::Index>(gt->validity.size()) != k))
      throw Error(ErrorCode::InvalidInput,
                  "frame '" + frame_id + "': ground-truth length differs from keypoint count");
  }
};

/// Per-descriptor world points in meters, one per column.
using SceneCoordinates = Matrix3Xd;

}  // namespace f2m
