#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "f2m/core/error.hpp"

namespace f2m {

/// Pinhole intrinsics, no distortion.
struct CameraIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 320.0;
  double cy = 240.0;

  void validate() const {
    if (!(fx > 0.0 && fy > 0.0)) throw Error(ErrorCode::InvalidInput, "focal lengths must be positive");
  }
  Eigen::Vector3d bearing(const Eigen::Vector2d& px) const {
    return Eigen::Vector3d((px.x() - cx) / fx, (px.y() - cy) / fy, 1.0).normalized();
  }
};

/// World-to-camera rigid transform: x_cam = R * x_world + t.
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose from_rt(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
    Pose p;
    p.rotation = Eigen::Quaterniond(R).normalized();
    p.translation = t;
    return p;
  }

  /// Camera looking from `center` at `target`; image y points away from `up`.
  static Pose look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                      const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ()) {
    const Eigen::Vector3d z = (target - center).normalized();
    Eigen::Vector3d x = z.cross(up);
    if (x.norm() < 1e-9) x = z.unitOrthogonal();
    x.normalize();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d R;
    R.row(0) = x;
    R.row(1) = y;
    R.row(2) = z;
    return from_rt(R, -R * center);
  }

  Eigen::Matrix3d R() const { return rotation.toRotationMatrix(); }
  Eigen::Vector3d center() const { return -(rotation.conjugate() * translation); }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return rotation * world + translation; }
};

struct Correspondence2D3D {
  Eigen::Vector2d pixel;
  Eigen::Vector3d world;
};

inline constexpr double kMinDepth = 1e-9;

inline Eigen::Vector2d project_camera(const Eigen::Vector3d& pc, const CameraIntrinsics& K) {
  return {K.fx * pc.x() / pc.z() + K.cx, K.fy * pc.y() / pc.z() + K.cy};
}

/// Pixel of a world point; throws BehindCamera for depth <= 1e-9.
inline Eigen::Vector2d project(const Eigen::Vector3d& world, const Pose& pose, const CameraIntrinsics& K) {
  const Eigen::Vector3d pc = pose.to_camera(world);
  if (!(pc.z() > kMinDepth)) throw Error(ErrorCode::BehindCamera, "camera-frame depth " + std::to_string(pc.z()));
  return project_camera(pc, K);
}

/// Reprojection error in pixels, +inf when the point is not in front.
inline double reprojection_error(const Correspondence2D3D& c, const Pose& pose, const CameraIntrinsics& K) {
  const Eigen::Vector3d pc = pose.to_camera(c.world);
  if (!(pc.z() > kMinDepth)) return std::numeric_limits<double>::infinity();
  return (project_camera(pc, K) - c.pixel).norm();
}

}  // namespace f2m
