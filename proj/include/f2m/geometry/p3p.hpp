#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "f2m/core/error.hpp"
#include "f2m/geometry/camera.hpp"

namespace f2m {

namespace detail {

// Polynomials are stored lowest degree first.
using Poly = std::vector<double>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly poly_add(Poly a, const Poly& b, double scale = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

inline double poly_eval(const Poly& p, double x) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

inline double poly_deriv_eval(const Poly& p, double x) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 1;) v = v * x + static_cast<double>(i) * p[i];
  return v;
}

/// Real roots of a polynomial of degree <= 4 via companion-matrix
/// eigenvalues, each polished with a few Newton steps.
inline std::vector<double> real_roots(Poly p) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  while (p.size() > 1 && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
  const auto degree = static_cast<Eigen::Index>(p.size()) - 1;
  if (degree < 1) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 0; i < degree; ++i) companion(0, i) = -p[static_cast<std::size_t>(degree - 1 - i)] / p.back();
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, false);
  if (eig.info() != Eigen::Success) return {};

  std::vector<double> roots;
  for (Eigen::Index i = 0; i < degree; ++i) {
    const auto z = eig.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double d = poly_deriv_eval(p, x);
      if (d == 0.0) break;
      const double step = poly_eval(p, x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

}  // namespace detail

/// Pixel tolerance a minimal-solver candidate must meet on its own sample.
inline constexpr double kP3PReprojTolerance = 1e-6;

/// Minimal absolute pose from three 2D-3D matches using the classical
/// distance formulation: with unknown depths s1, s2 = u*s1, s3 = v*s1 along
/// the three bearings, the law of cosines on the three triangles reduces to
/// a quartic in v. Returns every admissible pose (up to four); an empty
/// result means no real root with positive depths exists.
inline std::vector<Pose> solve_p3p(std::span<const Correspondence2D3D> corr, const CameraIntrinsics& K) {
  if (corr.size() != 3) throw Error(ErrorCode::InvalidInput, "P3P needs exactly three correspondences");
  K.validate();
  const Eigen::Vector3d& P1 = corr[0].world;
  const Eigen::Vector3d& P2 = corr[1].world;
  const Eigen::Vector3d& P3 = corr[2].world;
  if (0.5 * (P2 - P1).cross(P3 - P1).norm() <= 1e-9)
    throw Error(ErrorCode::DegenerateSample, "world points are collinear or coincident");

  const Eigen::Vector3d j1 = K.bearing(corr[0].pixel);
  const Eigen::Vector3d j2 = K.bearing(corr[1].pixel);
  const Eigen::Vector3d j3 = K.bearing(corr[2].pixel);
  const double cos_a = j2.dot(j3);
  const double cos_b = j1.dot(j3);
  const double cos_g = j1.dot(j2);
  const double a2 = (P2 - P3).squaredNorm();
  const double b2 = (P1 - P3).squaredNorm();
  const double c2 = (P1 - P2).squaredNorm();

  // u = N(v) / D(v) eliminates u between the (a) and (b) triangle equations;
  // substituting into the (c) triangle equation, times D^2, gives the quartic.
  const double p = (a2 - c2) / b2;
  const detail::Poly N{1.0 + p, -2.0 * p * cos_b, p - 1.0};
  const detail::Poly D{2.0 * cos_g, -2.0 * cos_a};
  const detail::Poly S{1.0, -2.0 * cos_b, 1.0};  // s1^2 = b^2 / S(v)
  const detail::Poly D2 = detail::poly_mul(D, D);
  detail::Poly quartic = detail::poly_add(D2, detail::poly_mul(N, N));
  quartic = detail::poly_add(quartic, detail::poly_mul(N, D), -2.0 * cos_g);
  quartic = detail::poly_add(quartic, detail::poly_mul(S, D2), -c2 / b2);

  const std::array<Eigen::Vector3d, 3> bearings{j1, j2, j3};
  const std::array<double, 3> cosines{cos_a, cos_b, cos_g};  // pairs (2,3), (1,3), (1,2)
  const std::array<double, 3> sq_dists{a2, b2, c2};

  std::vector<Pose> out;
  for (const double v : detail::real_roots(quartic)) {
    if (!(v > 0.0)) continue;
    const double den = detail::poly_eval(D, v);
    const double sv = detail::poly_eval(S, v);
    if (std::abs(den) < 1e-14 || !(sv > 0.0)) continue;
    const double u = detail::poly_eval(N, v) / den;
    if (!(u > 0.0)) continue;
    Eigen::Vector3d s;
    s[0] = std::sqrt(b2 / sv);
    s[1] = u * s[0];
    s[2] = v * s[0];

    // Newton on the three distance equations recovers full precision lost
    // in the polynomial reduction.
    for (int it = 0; it < 5; ++it) {
      Eigen::Vector3d f;
      Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
      const int pairs[3][2] = {{1, 2}, {0, 2}, {0, 1}};
      for (int e = 0; e < 3; ++e) {
        const int i = pairs[e][0];
        const int k = pairs[e][1];
        f[e] = s[i] * s[i] + s[k] * s[k] - 2.0 * s[i] * s[k] * cosines[e] - sq_dists[e];
        J(e, i) = 2.0 * s[i] - 2.0 * s[k] * cosines[e];
        J(e, k) = 2.0 * s[k] - 2.0 * s[i] * cosines[e];
      }
      const Eigen::Vector3d step = J.fullPivLu().solve(f);
      if (!step.allFinite()) break;
      s -= step;
      if (step.norm() <= 1e-15 * s.norm()) break;
    }
    if (!(s.minCoeff() > 0.0)) continue;

    Eigen::Matrix3d cam;
    Eigen::Matrix3d world;
    for (int i = 0; i < 3; ++i) {
      cam.col(i) = s[i] * bearings[static_cast<std::size_t>(i)];
      world.col(i) = corr[static_cast<std::size_t>(i)].world;
    }
    const Eigen::Matrix4d T = Eigen::umeyama(world, cam, false);
    const Pose pose = Pose::from_rt(T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>());

    bool ok = true;
    for (const auto& c : corr) ok = ok && reprojection_error(c, pose, K) <= kP3PReprojTolerance;
    if (ok) out.push_back(pose);
  }
  return out;
}

}  // namespace f2m
