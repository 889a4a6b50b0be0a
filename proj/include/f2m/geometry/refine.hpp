#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "f2m/core/error.hpp"
#include "f2m/geometry/camera.hpp"

namespace f2m {

struct RefineOptions {
  int max_iters = 50;
  double tol = 1e-12;  // stop once the 6-vector step norm drops below this
};

namespace detail {

inline Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

inline Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

/// Sum of squared reprojection errors; +inf if any point leaves the front
/// half-space.
inline double reprojection_cost(const Eigen::Matrix3d& R, const Eigen::Vector3d& t,
                                std::span<const Correspondence2D3D> corr, const CameraIntrinsics& K) {
  double cost = 0.0;
  for (const auto& c : corr) {
    const Eigen::Vector3d pc = R * c.world + t;
    if (!(pc.z() > kMinDepth)) return std::numeric_limits<double>::infinity();
    cost += (project_camera(pc, K) - c.pixel).squaredNorm();
  }
  return cost;
}

}  // namespace detail

/// Gauss-Newton on the squared pixel reprojection error. The increment is
/// (w, dt) applied as R <- exp(w) R, t <- exp(w) t + dt. A step that raises
/// the cost is retried with Levenberg damping. Points behind the initial
/// camera are dropped; the returned pose never has a higher cost than the
/// initial one.
inline Pose refine_pose(const Pose& initial, std::span<const Correspondence2D3D> corr, const CameraIntrinsics& K,
                        const RefineOptions& options = {}) {
  K.validate();
  std::vector<Correspondence2D3D> usable;
  usable.reserve(corr.size());
  for (const auto& c : corr)
    if (initial.to_camera(c.world).z() > kMinDepth) usable.push_back(c);
  if (usable.size() < 3)
    throw Error(ErrorCode::InsufficientData,
                "pose refinement needs >= 3 correspondences in front of the camera, got " +
                    std::to_string(usable.size()));

  Eigen::Matrix3d R = initial.R();
  Eigen::Vector3d t = initial.translation;
  double cost = detail::reprojection_cost(R, t, usable, K);

  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    Mat6 H = Mat6::Zero();
    Vec6 g = Vec6::Zero();
    for (const auto& c : usable) {
      const Eigen::Vector3d pc = R * c.world + t;
      const double iz = 1.0 / pc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << K.fx * iz, 0.0, -K.fx * pc.x() * iz * iz, 0.0, K.fy * iz, -K.fy * pc.y() * iz * iz;
      Eigen::Matrix<double, 2, 6> J;
      J.leftCols<3>() = -dproj * detail::skew(pc);
      J.rightCols<3>() = dproj;
      const Eigen::Vector2d r = project_camera(pc, K) - c.pixel;
      H.noalias() += J.transpose() * J;
      g.noalias() += J.transpose() * r;
    }

    double lambda = 0.0;
    const double diag_scale = std::max(H.diagonal().maxCoeff(), 1e-12);
    bool accepted = false;
    bool solved = false;
    Vec6 step = Vec6::Zero();
    for (int attempt = 0; attempt < 12; ++attempt) {
      Mat6 A = H;
      A.diagonal().array() += lambda;
      step = -A.ldlt().solve(g);
      if (!step.allFinite() || !((A * step + g).norm() <= 1e-6 * (g.norm() + 1e-300) + 1e-12)) {
        lambda = lambda == 0.0 ? 1e-9 * diag_scale : lambda * 10.0;
        continue;
      }
      solved = true;
      const Eigen::Matrix3d dR = detail::exp_so3(step.head<3>());
      const Eigen::Matrix3d R_new = dR * R;
      const Eigen::Vector3d t_new = dR * t + step.tail<3>();
      const double cost_new = detail::reprojection_cost(R_new, t_new, usable, K);
      if (cost_new <= cost) {
        R = R_new;
        t = t_new;
        cost = cost_new;
        accepted = true;
        break;
      }
      if (step.norm() < options.tol) break;  // no further decrease available at this scale
      lambda = lambda == 0.0 ? 1e-6 * diag_scale : lambda * 10.0;
    }
    if (!solved) throw Error(ErrorCode::NonConvergence, "normal equations singular after damping");
    if (!accepted || step.norm() < options.tol) break;
  }

  // Re-orthonormalize through the quaternion.
  return Pose::from_rt(R, t);
}

}  // namespace f2m
