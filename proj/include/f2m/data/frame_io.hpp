#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "f2m/core/binary_io.hpp"
#include "f2m/core/types.hpp"

namespace f2m {

// Per-frame binary layout (little-endian):
//   "F2M1", u32 version, u32 k, u32 M, u8 has_gt,
//   k*2 f32 keypoints (x, y), k f32 scores, k*M f32 descriptors,
//   [has_gt] k*3 f32 coordinates, k u8 validity.
inline constexpr std::string_view kFrameMagic = "F2M1";
inline constexpr std::uint32_t kFrameVersion = 1;

inline std::vector<char> encode_frame(const DescriptorSet& frame) {
  frame.check();
  const auto k = static_cast<std::uint32_t>(frame.size());
  const auto m = static_cast<std::uint32_t>(frame.dim());
  std::vector<char> buf;
  buf.reserve(17 + static_cast<std::size_t>(k) * (12 + 4 * m + 13));
  io::put_bytes(buf, kFrameMagic);
  io::put_le<std::uint32_t>(buf, kFrameVersion);
  io::put_le<std::uint32_t>(buf, k);
  io::put_le<std::uint32_t>(buf, m);
  io::put_le<std::uint8_t>(buf, frame.gt ? 1 : 0);
  for (Eigen::Index i = 0; i < frame.keypoints.size(); ++i) io::put_le<float>(buf, frame.keypoints.data()[i]);
  for (Eigen::Index i = 0; i < frame.scores.size(); ++i) io::put_le<float>(buf, frame.scores(i));
  for (Eigen::Index i = 0; i < frame.descriptors.size(); ++i) io::put_le<float>(buf, frame.descriptors.data()[i]);
  if (frame.gt) {
    for (Eigen::Index i = 0; i < frame.gt->coords.size(); ++i) io::put_le<float>(buf, frame.gt->coords.data()[i]);
    for (auto v : frame.gt->validity) io::put_le<std::uint8_t>(buf, v);
  }
  return buf;
}

inline DescriptorSet decode_frame(io::Reader& in, std::string frame_id = {}) {
  if (in.get_bytes(4) != kFrameMagic) in.fail("bad magic (expected F2M1)");
  const auto version = in.get<std::uint32_t>();
  if (version != kFrameVersion) in.fail("unsupported frame version " + std::to_string(version));
  const auto k = in.get<std::uint32_t>();
  const auto m = in.get<std::uint32_t>();
  const auto has_gt = in.get<std::uint8_t>();
  if (m == 0) in.fail("descriptor dimension is zero");
  if (has_gt > 1) in.fail("has_gt flag must be 0 or 1");
  const std::size_t per_kp = 4 * (2 + 1 + static_cast<std::size_t>(m)) + (has_gt ? 13 : 0);
  if (in.remaining() != per_kp * k)
    in.fail("payload holds " + std::to_string(in.remaining()) + " bytes, header implies " +
            std::to_string(per_kp * k));

  DescriptorSet f;
  f.frame_id = std::move(frame_id);
  f.keypoints.resize(2, k);
  f.scores.resize(k);
  f.descriptors.resize(m, k);
  for (Eigen::Index i = 0; i < f.keypoints.size(); ++i) f.keypoints.data()[i] = in.get<float>();
  for (Eigen::Index i = 0; i < f.scores.size(); ++i) f.scores(i) = in.get<float>();
  for (Eigen::Index i = 0; i < f.descriptors.size(); ++i) f.descriptors.data()[i] = in.get<float>();
  if (has_gt) {
    GroundTruthCoords gt;
    gt.coords.resize(3, k);
    for (Eigen::Index i = 0; i < gt.coords.size(); ++i) gt.coords.data()[i] = in.get<float>();
    gt.validity.resize(k);
    for (auto& v : gt.validity) {
      v = in.get<std::uint8_t>();
      if (v > 1) in.fail("validity flags must be 0 or 1");
    }
    f.gt = std::move(gt);
  }
  return f;
}

inline void write_frame(const DescriptorSet& frame, const std::filesystem::path& path) {
  io::write_file(path, encode_frame(frame));
}

inline DescriptorSet read_frame(const std::filesystem::path& path, std::string frame_id = {}) {
  io::Reader in(io::read_file(path), path.string());
  return decode_frame(in, frame_id.empty() ? path.stem().string() : std::move(frame_id));
}

}  // namespace f2m
