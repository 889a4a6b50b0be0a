#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "f2m/core/error.hpp"
#include "f2m/core/seed.hpp"
#include "f2m/core/types.hpp"
#include "f2m/data/dataset.hpp"
#include "f2m/geometry/camera.hpp"

namespace f2m::synth {

struct SynthConfig {
  std::string scene = "synthetic";
  std::size_t n_landmarks = 3000;
  Eigen::Vector3d box_extent{4.0, 4.0, 4.0};  // meters, centered on the origin
  std::size_t descriptor_dim = 64;
  double descriptor_noise = 0.05;  // per-component sigma before re-normalization
  double pixel_noise = 1.0;
  double max_similarity = 0.6;     // cap on canonical descriptor dot products
  double score_jitter = 0.05;      // per-observation noise on landmark detectability
  std::size_t n_train_views = 200;
  std::size_t n_test_views = 50;
  double radius_min = 3.5;
  double radius_max = 4.5;
  double height_min = -0.5;
  double height_max = 1.5;
  double target_jitter = 0.3;      // sigma of the look-at point around the box center
  double outlier_fraction = 0.3;   // for synthetic correspondence sets
  CameraIntrinsics intrinsics{525.0, 525.0, 320.0, 240.0};
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(box_extent.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidInput, "box extents must be positive");
    if (descriptor_dim == 0) throw Error(ErrorCode::InvalidInput, "descriptor_dim must be positive");
    if (descriptor_noise < 0.0 || pixel_noise < 0.0 || score_jitter < 0.0 || target_jitter < 0.0)
      throw Error(ErrorCode::InvalidInput, "noise levels must be non-negative");
    if (radius_min <= 0.0 || radius_max < radius_min || height_max < height_min)
      throw Error(ErrorCode::InvalidInput, "bad trajectory ranges");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
      throw Error(ErrorCode::InvalidInput, "outlier_fraction must be in [0, 1)");
    if (!(max_similarity > 0.0 && max_similarity <= 1.0))
      throw Error(ErrorCode::InvalidInput, "max_similarity must be in (0, 1]");
    intrinsics.validate();
    if (width == 0 || height == 0) throw Error(ErrorCode::InvalidInput, "image size must be positive");
  }
};

struct Scene {
  Matrix3Xd landmarks;          // float-representable positions
  Eigen::MatrixXf descriptors;  // canonical, unit norm, one per column
  Eigen::VectorXf detectability;

  std::size_t size() const { return static_cast<std::size_t>(landmarks.cols()); }
};

// Stream indices reserved per purpose so adding views never shifts another stream.
inline constexpr std::uint64_t kSceneStream = 0;
inline constexpr std::uint64_t kTrainPoseStream = 1;
inline constexpr std::uint64_t kTestPoseStream = 2;
inline constexpr std::uint64_t kViewStreamBase = 1'000'000;

/// Landmarks uniform in the box with unit-norm canonical descriptors. A
/// descriptor whose dot product with an earlier one reaches max_similarity
/// is redrawn.
inline Scene generate_scene(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(mix_seed(cfg.seed, kSceneStream));
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<float> detect(0.1f, 1.0f);
  std::normal_distribution<float> gauss(0.0f, 1.0f);

  const auto n = static_cast<Eigen::Index>(cfg.n_landmarks);
  const auto m = static_cast<Eigen::Index>(cfg.descriptor_dim);
  Scene s;
  s.landmarks.resize(3, n);
  s.descriptors.resize(m, n);
  s.detectability.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c)
      s.landmarks(c, i) = static_cast<double>(static_cast<float>(unit(rng) * cfg.box_extent[c]));
    s.detectability(i) = detect(rng);
    Eigen::VectorXf d(m);
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000)
        throw Error(ErrorCode::DegenerateInput, "cannot draw a distinct descriptor; lower n_landmarks or raise M");
      for (Eigen::Index c = 0; c < m; ++c) d(c) = gauss(rng);
      d.normalize();
      if (i == 0 || (s.descriptors.leftCols(i).transpose() * d).maxCoeff() < cfg.max_similarity) break;
    }
    s.descriptors.col(i) = d;
  }
  return s;
}

/// Camera on a jittered orbit around the vertical axis through the box
/// center, looking at a jittered point near the center.
inline Pose orbit_pose(const SynthConfig& cfg, std::size_t index, std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, cfg.target_jitter);
  const double angle = 2.0 * std::numbers::pi * (static_cast<double>(index) + u01(rng)) /
                       static_cast<double>(std::max<std::size_t>(count, 1));
  const double r = cfg.radius_min + (cfg.radius_max - cfg.radius_min) * u01(rng);
  const double h = cfg.height_min + (cfg.height_max - cfg.height_min) * u01(rng);
  const Eigen::Vector3d center(r * std::cos(angle), r * std::sin(angle), h);
  const Eigen::Vector3d target(jitter(rng), jitter(rng), jitter(rng));
  return Pose::look_at(center, target);
}

inline std::vector<Pose> trajectory(const SynthConfig& cfg, std::size_t count, std::uint64_t stream) {
  std::mt19937_64 rng(mix_seed(cfg.seed, stream));
  std::vector<Pose> poses;
  for (std::size_t i = 0; i < count; ++i) poses.push_back(orbit_pose(cfg, i, count, rng));
  return poses;
}

/// Observation of every landmark that projects inside the image with
/// positive depth, in landmark order. Keypoints carry pixel noise,
/// descriptors carry re-normalized Gaussian noise; labels are exact.
inline DescriptorSet render_view(const Scene& scene, const Pose& pose, const SynthConfig& cfg,
                                 std::uint64_t view_seed, std::string frame_id = {}) {
  std::mt19937_64 rng(view_seed);
  std::normal_distribution<double> px_noise(0.0, 1.0);
  std::normal_distribution<float> desc_noise(0.0f, 1.0f);
  const auto& K = cfg.intrinsics;

  std::vector<Eigen::Index> visible;
  std::vector<Eigen::Vector2d> exact;
  for (Eigen::Index i = 0; i < scene.landmarks.cols(); ++i) {
    const Eigen::Vector3d pc = pose.to_camera(scene.landmarks.col(i));
    if (!(pc.z() > kMinDepth)) continue;
    const Eigen::Vector2d px = project_camera(pc, K);
    if (px.x() < 0.0 || px.y() < 0.0 || px.x() >= cfg.width || px.y() >= cfg.height) continue;
    visible.push_back(i);
    exact.push_back(px);
  }

  const auto k = static_cast<Eigen::Index>(visible.size());
  const auto m = scene.descriptors.rows();
  DescriptorSet f;
  f.frame_id = std::move(frame_id);
  f.keypoints.resize(2, k);
  f.scores.resize(k);
  f.descriptors.resize(m, k);
  f.gt = GroundTruthCoords{Matrix3Xf(3, k), std::vector<std::uint8_t>(static_cast<std::size_t>(k), 1)};
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index lm = visible[static_cast<std::size_t>(j)];
    const Eigen::Vector2d px = exact[static_cast<std::size_t>(j)];
    const double nx = px_noise(rng), ny = px_noise(rng);
    f.keypoints(0, j) = static_cast<float>(px.x() + cfg.pixel_noise * nx);
    f.keypoints(1, j) = static_cast<float>(px.y() + cfg.pixel_noise * ny);
    const float jitter = static_cast<float>(cfg.score_jitter) * desc_noise(rng);
    f.scores(j) = std::clamp(scene.detectability(lm) + jitter, 0.0f, 1.0f);
    Eigen::VectorXf d = scene.descriptors.col(lm);
    if (cfg.descriptor_noise > 0.0) {
      for (Eigen::Index c = 0; c < m; ++c) d(c) += static_cast<float>(cfg.descriptor_noise) * desc_noise(rng);
      d.normalize();
    }
    f.descriptors.col(j) = d;
    f.gt->coords.col(j) = scene.landmarks.col(lm).cast<float>();
  }
  return f;
}

/// Train views followed by test views, each with labels and poses.
inline SceneDataset build_dataset(const SynthConfig& cfg) {
  const Scene scene = generate_scene(cfg);
  SceneDataset ds;
  ds.manifest.scene = cfg.scene;
  ds.manifest.version = kManifestVersion;
  ds.manifest.descriptor_dim = cfg.descriptor_dim;
  ds.manifest.intrinsics = cfg.intrinsics;
  ds.manifest.width = cfg.width;
  ds.manifest.height = cfg.height;

  auto add = [&](const std::vector<Pose>& poses, Split split, const std::string& prefix, std::uint64_t base) {
    for (std::size_t i = 0; i < poses.size(); ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s_%04zu", prefix.c_str(), i);
      ds.manifest.frames.push_back({id, std::string(id) + ".f2m", poses[i], split});
      ds.frames.push_back(render_view(scene, poses[i], cfg, mix_seed(cfg.seed, base + i), id));
    }
  };
  add(trajectory(cfg, cfg.n_train_views, kTrainPoseStream), Split::Train, "train", kViewStreamBase);
  add(trajectory(cfg, cfg.n_test_views, kTestPoseStream), Split::Test, "test", 2 * kViewStreamBase);
  return ds;
}

/// Correspondence set for robust-estimation tests: `n_inliers` visible
/// landmarks with Gaussian pixel noise followed by `n_outliers` pairs of a
/// uniform pixel and a uniform box point. Outliers are redrawn until their
/// error under the true pose exceeds `outlier_margin_px`, so none of them is
/// consistent with the truth.
inline std::vector<Correspondence2D3D> contaminated_correspondences(const Scene& scene, const Pose& pose,
                                                                    const SynthConfig& cfg, std::size_t n_inliers,
                                                                    std::size_t n_outliers, double outlier_margin_px,
                                                                    std::mt19937_64& rng) {
  std::vector<Eigen::Index> visible;
  for (Eigen::Index i = 0; i < scene.landmarks.cols(); ++i) {
    const Eigen::Vector3d pc = pose.to_camera(scene.landmarks.col(i));
    if (!(pc.z() > kMinDepth)) continue;
    const Eigen::Vector2d px = project_camera(pc, cfg.intrinsics);
    if (px.x() >= 0 && px.y() >= 0 && px.x() < cfg.width && px.y() < cfg.height) visible.push_back(i);
  }
  if (visible.size() < n_inliers) throw Error(ErrorCode::InsufficientData, "too few visible landmarks");
  std::shuffle(visible.begin(), visible.end(), rng);

  std::normal_distribution<double> noise(0.0, cfg.pixel_noise);
  std::uniform_real_distribution<double> ux(0.0, cfg.width), uy(0.0, cfg.height), unit(-0.5, 0.5);
  std::vector<Correspondence2D3D> out;
  for (std::size_t i = 0; i < n_inliers; ++i) {
    const Eigen::Vector3d w = scene.landmarks.col(visible[i]);
    out.push_back({project(w, pose, cfg.intrinsics) + Eigen::Vector2d(noise(rng), noise(rng)), w});
  }
  for (std::size_t i = 0; i < n_outliers; ++i) {
    Correspondence2D3D c;
    do {
      c.pixel = {ux(rng), uy(rng)};
      c.world = {unit(rng) * cfg.box_extent.x(), unit(rng) * cfg.box_extent.y(), unit(rng) * cfg.box_extent.z()};
    } while (reprojection_error(c, pose, cfg.intrinsics) <= outlier_margin_px);
    out.push_back(c);
  }
  return out;
}

}  // namespace f2m::synth
