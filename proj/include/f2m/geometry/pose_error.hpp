#pragma once

#include <cmath>
#include <numbers>

#include "f2m/geometry/camera.hpp"

namespace f2m {

struct PoseError {
  double meters = 0.0;
  double degrees = 0.0;
};

/// Camera-center distance and relative rotation angle. The angle equals
/// 2*acos(|<q_est, q_true>|) but is evaluated through atan2 so that
/// sub-microdegree errors are resolved.
inline PoseError pose_error(const Pose& estimate, const Pose& truth) {
  PoseError e;
  e.meters = (estimate.center() - truth.center()).norm();
  const Eigen::Quaterniond rel = estimate.rotation.normalized().conjugate() * truth.rotation.normalized();
  const double angle = 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
  e.degrees = angle * 180.0 / std::numbers::pi;
  return e;
}

}  // namespace f2m
