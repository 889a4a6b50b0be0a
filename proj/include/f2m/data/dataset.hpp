#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "f2m/core/error.hpp"
#include "f2m/core/types.hpp"
#include "f2m/data/frame_io.hpp"
#include "f2m/geometry/camera.hpp"

namespace f2m {

enum class Split { Train, Test };

inline std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

struct FrameEntry {
  std::string id;
  std::string desc_file;  // relative to the dataset directory
  std::optional<Pose> pose;
  Split split = Split::Train;
};

struct Manifest {
  std::string scene;
  std::uint32_t version = 1;
  std::size_t descriptor_dim = 0;
  CameraIntrinsics intrinsics;
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  std::vector<FrameEntry> frames;
};

/// A scene on disk: manifest.json plus one .f2m file per frame. frames[i]
/// belongs to manifest.frames[i].
struct SceneDataset {
  Manifest manifest;
  std::vector<DescriptorSet> frames;

  std::vector<std::size_t> indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < manifest.frames.size(); ++i)
      if (manifest.frames[i].split == split) out.push_back(i);
    return out;
  }
};

inline constexpr std::uint32_t kManifestVersion = 1;

/// Checks the cross-file invariants; the message names the first offending frame.
inline void validate_dataset(const SceneDataset& ds) {
  const auto& m = ds.manifest;
  if (m.descriptor_dim == 0) throw Error(ErrorCode::FormatError, "manifest descriptor dimension is zero");
  try {
    m.intrinsics.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::FormatError, std::string("manifest intrinsics: ") + e.what());
  }
  if (ds.frames.size() != m.frames.size())
    throw Error(ErrorCode::FormatError, "manifest lists " + std::to_string(m.frames.size()) + " frames but " +
                                            std::to_string(ds.frames.size()) + " are loaded");
  for (std::size_t i = 0; i < ds.frames.size(); ++i) {
    const auto& e = m.frames[i];
    const auto& f = ds.frames[i];
    try {
      f.check();
    } catch (const Error& err) {
      throw Error(ErrorCode::FormatError, "frame '" + e.id + "': " + err.what());
    }
    if (f.dim() != m.descriptor_dim)
      throw Error(ErrorCode::FormatError, "frame '" + e.id + "' stores M = " + std::to_string(f.dim()) +
                                              " but the manifest declares M = " + std::to_string(m.descriptor_dim));
    if (e.split == Split::Train && !f.gt)
      throw Error(ErrorCode::FormatError, "train frame '" + e.id + "' has no ground-truth coordinates");
    if (e.split == Split::Test && !e.pose)
      throw Error(ErrorCode::FormatError, "test frame '" + e.id + "' has no ground-truth pose");
    if (e.pose && std::abs(e.pose->rotation.norm() - 1.0) > 1e-6)
      throw Error(ErrorCode::FormatError, "frame '" + e.id + "' pose quaternion is not unit length");
    if (!f.keypoints.allFinite() || !f.scores.allFinite() || !f.descriptors.allFinite() ||
        (f.gt && !f.gt->coords.allFinite()))
      throw Error(ErrorCode::FormatError, "frame '" + e.id + "' contains non-finite values");
  }
}

namespace detail {

inline nlohmann::ordered_json manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["scene"] = m.scene;
  j["version"] = m.version;
  j["M"] = m.descriptor_dim;
  j["intrinsics"] = {{"fx", m.intrinsics.fx}, {"fy", m.intrinsics.fy}, {"cx", m.intrinsics.cx},
                     {"cy", m.intrinsics.cy}, {"width", m.width},        {"height", m.height}};
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : m.frames) {
    nlohmann::ordered_json fj;
    fj["id"] = f.id;
    fj["desc_file"] = f.desc_file;
    if (f.pose) {
      const auto& q = f.pose->rotation;
      const auto& t = f.pose->translation;
      fj["pose"] = {q.w(), q.x(), q.y(), q.z(), t.x(), t.y(), t.z()};
    }
    fj["split"] = to_string(f.split);
    frames.push_back(std::move(fj));
  }
  j["frames"] = std::move(frames);
  return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j, const std::string& source) {
  auto fail = [&](const std::string& what) -> Error { return Error(ErrorCode::FormatError, source + ": " + what); };
  try {
    Manifest m;
    m.scene = j.at("scene").get<std::string>();
    m.version = j.at("version").get<std::uint32_t>();
    if (m.version != kManifestVersion) throw fail("unsupported manifest version " + std::to_string(m.version));
    m.descriptor_dim = j.at("M").get<std::size_t>();
    const auto& k = j.at("intrinsics");
    m.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                    k.at("cy").get<double>()};
    m.width = k.at("width").get<std::uint32_t>();
    m.height = k.at("height").get<std::uint32_t>();
    for (const auto& fj : j.at("frames")) {
      FrameEntry e;
      e.id = fj.at("id").get<std::string>();
      e.desc_file = fj.at("desc_file").get<std::string>();
      const auto split = fj.at("split").get<std::string>();
      if (split == "train")
        e.split = Split::Train;
      else if (split == "test")
        e.split = Split::Test;
      else
        throw fail("frame '" + e.id + "' has unknown split '" + split + "'");
      if (fj.contains("pose") && !fj.at("pose").is_null()) {
        const auto v = fj.at("pose").get<std::vector<double>>();
        if (v.size() != 7) throw fail("frame '" + e.id + "' pose must have 7 numbers");
        Pose p;
        p.rotation = Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
        p.translation = {v[4], v[5], v[6]};
        e.pose = p;
      }
      m.frames.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
}

}  // namespace detail

inline void write_dataset(const SceneDataset& ds, const std::filesystem::path& dir) {
  validate_dataset(ds);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ds.frames.size(); ++i)
    write_frame(ds.frames[i], dir / ds.manifest.frames[i].desc_file);
  io::write_file(dir / "manifest.json", detail::manifest_to_json(ds.manifest).dump(2) + "\n");
}

inline Manifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  return detail::manifest_from_json(j, path.string());
}

/// Loads and validates every frame listed in the manifest.
inline SceneDataset read_dataset(const std::filesystem::path& dir) {
  SceneDataset ds;
  ds.manifest = read_manifest(dir);
  for (const auto& e : ds.manifest.frames) {
    try {
      ds.frames.push_back(read_frame(dir / e.desc_file, e.id));
    } catch (const Error& err) {
      throw Error(err.code() == ErrorCode::IoError ? ErrorCode::IoError : ErrorCode::FormatError,
                  "frame '" + e.id + "': " + err.what());
    }
  }
  validate_dataset(ds);
  return ds;
}

/// Keeps round(fraction * n) frames drawn without replacement; survivors
/// keep their original order.
inline SceneDataset subsample_frames(const SceneDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidInput, "fraction must be in (0, 1]");
  const std::size_t n = ds.frames.size();
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (keep == 0)
    throw Error(ErrorCode::DegenerateInput, "fraction " + std::to_string(fraction) + " of " + std::to_string(n) +
                                                " frames leaves nothing");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());

  SceneDataset out;
  out.manifest = ds.manifest;
  out.manifest.frames.clear();
  for (auto i : idx) {
    out.manifest.frames.push_back(ds.manifest.frames[i]);
    out.frames.push_back(ds.frames[i]);
  }
  return out;
}

/// Columns `keep` (ascending) of a frame, all per-keypoint arrays together.
inline DescriptorSet select_columns(const DescriptorSet& f, const std::vector<Eigen::Index>& keep) {
  DescriptorSet out;
  out.frame_id = f.frame_id;
  const auto n = static_cast<Eigen::Index>(keep.size());
  out.keypoints.resize(2, n);
  out.scores.resize(n);
  out.descriptors.resize(f.descriptors.rows(), n);
  if (f.gt) out.gt = GroundTruthCoords{Matrix3Xf(3, n), std::vector<std::uint8_t>(keep.size())};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = keep[static_cast<std::size_t>(j)];
    out.keypoints.col(j) = f.keypoints.col(src);
    out.scores(j) = f.scores(src);
    out.descriptors.col(j) = f.descriptors.col(src);
    if (f.gt) {
      out.gt->coords.col(j) = f.gt->coords.col(src);
      out.gt->validity[static_cast<std::size_t>(j)] = f.gt->validity[static_cast<std::size_t>(src)];
    }
  }
  return out;
}

/// The min(k, available) highest-scoring keypoints (ties: lower index
/// first), returned in their original relative order.
inline DescriptorSet top_k_descriptors(const DescriptorSet& frame, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  frame.check();
  if (k >= frame.size()) return frame;
  std::vector<Eigen::Index> order(frame.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return frame.scores(a) > frame.scores(b); });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return select_columns(frame, order);
}

}  // namespace f2m
