#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "f2m/core/error.hpp"
#include "f2m/geometry/camera.hpp"
#include "f2m/geometry/p3p.hpp"
#include "f2m/geometry/refine.hpp"

namespace f2m {

struct RansacConfig {
  double max_reproj_error_px = 12.0;
  std::size_t max_iterations = 10000;
  double confidence = 0.9999;
  std::uint64_t seed = 0;
  bool refine_on_inliers = true;

  void validate() const {
    if (!(max_reproj_error_px > 0.0)) throw Error(ErrorCode::InvalidInput, "inlier threshold must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorCode::InvalidInput, "confidence must be in (0, 1)");
  }
};

struct RansacResult {
  Pose pose;
  std::vector<std::uint8_t> inliers;
  std::size_t num_inliers = 0;
  std::size_t iterations = 0;
};

/// Iterations needed to draw one all-inlier triple with the given
/// confidence when a fraction `inlier_ratio` of the data are inliers.
inline std::size_t ransac_iteration_bound(double inlier_ratio, double confidence, std::size_t cap) {
  const double w3 = inlier_ratio * inlier_ratio * inlier_ratio;
  if (w3 <= 0.0) return cap;
  if (w3 >= 1.0) return std::min<std::size_t>(1, cap);
  const double n = std::log(1.0 - confidence) / std::log(1.0 - w3);
  if (!std::isfinite(n) || n >= static_cast<double>(cap)) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n)));
}

namespace detail {

struct Score {
  std::size_t inliers = 0;
  double error_sum = std::numeric_limits<double>::infinity();

  bool better_than(const Score& o) const {
    return inliers > o.inliers || (inliers == o.inliers && error_sum < o.error_sum);
  }
};

inline Score score_pose(const Pose& pose, std::span<const Correspondence2D3D> corr, const CameraIntrinsics& K,
                        double threshold, std::vector<std::uint8_t>* mask = nullptr) {
  const Eigen::Matrix3d R = pose.R();
  Score s{0, 0.0};
  if (mask) mask->assign(corr.size(), 0);
  for (std::size_t i = 0; i < corr.size(); ++i) {
    const Eigen::Vector3d pc = R * corr[i].world + pose.translation;
    if (!(pc.z() > kMinDepth)) continue;
    const double e = (project_camera(pc, K) - corr[i].pixel).norm();
    if (e <= threshold) {
      ++s.inliers;
      s.error_sum += e;
      if (mask) (*mask)[i] = 1;
    }
  }
  return s;
}

}  // namespace detail

/// Hypothesize-and-verify absolute pose: random triples through solve_p3p,
/// hypotheses ranked by inlier count (ties by summed inlier reprojection
/// error), adaptive stopping, then optional refinement on the inliers.
inline RansacResult estimate_pose_ransac(std::span<const Correspondence2D3D> corr, const CameraIntrinsics& K,
                                         const RansacConfig& config) {
  config.validate();
  K.validate();
  const std::size_t n = corr.size();
  if (n < 4)
    throw Error(ErrorCode::InsufficientData, "RANSAC needs >= 4 correspondences, got " + std::to_string(n));

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  RansacResult result;
  detail::Score best;
  std::size_t bound = config.max_iterations;
  std::array<Correspondence2D3D, 3> sample;
  std::size_t iter = 0;
  for (; iter < bound; ++iter) {
    std::size_t idx[3];
    idx[0] = pick(rng);
    do idx[1] = pick(rng); while (idx[1] == idx[0]);
    do idx[2] = pick(rng); while (idx[2] == idx[0] || idx[2] == idx[1]);
    for (int i = 0; i < 3; ++i) sample[static_cast<std::size_t>(i)] = corr[idx[i]];

    std::vector<Pose> candidates;
    try {
      candidates = solve_p3p(sample, K);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
      continue;
    }
    for (const auto& cand : candidates) {
      const detail::Score s = detail::score_pose(cand, corr, K, config.max_reproj_error_px);
      if (s.better_than(best)) {
        best = s;
        result.pose = cand;
        bound = ransac_iteration_bound(static_cast<double>(best.inliers) / static_cast<double>(n),
                                       config.confidence, config.max_iterations);
      }
    }
  }
  result.iterations = iter;

  if (best.inliers < 4)
    throw Error(ErrorCode::LocalizationFailure,
                "best hypothesis has " + std::to_string(best.inliers) + " inliers (need >= 4)");
  detail::score_pose(result.pose, corr, K, config.max_reproj_error_px, &result.inliers);
  result.num_inliers = best.inliers;

  if (!config.refine_on_inliers) return result;

  // Refine on the inlier set; a refined pose is kept only while its own
  // inlier set is at least as large, so the reported count never drops
  // below the best hypothesis.
  for (int round = 0; round < 2; ++round) {
    std::vector<Correspondence2D3D> inl;
    for (std::size_t i = 0; i < n; ++i)
      if (result.inliers[i]) inl.push_back(corr[i]);
    Pose refined;
    try {
      refined = refine_pose(result.pose, inl, K);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonConvergence || e.code() == ErrorCode::InsufficientData) break;
      throw;
    }
    std::vector<std::uint8_t> mask;
    const detail::Score s = detail::score_pose(refined, corr, K, config.max_reproj_error_px, &mask);
    if (s.inliers < result.num_inliers) break;
    const bool grew = s.inliers > result.num_inliers || mask != result.inliers;
    result.pose = refined;
    result.inliers = std::move(mask);
    result.num_inliers = s.inliers;
    if (!grew) break;
  }
  return result;
}

}  // namespace f2m
