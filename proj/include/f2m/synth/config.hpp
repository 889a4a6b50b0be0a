#pragma once

#include <ostream>

#include "f2m/core/key_value.hpp"
#include "f2m/synth/synth.hpp"

namespace f2m::synth {

/// Overrides defaults with the keys present; unknown keys are an error.
inline SynthConfig synth_config_from(KeyValues kv) {
  SynthConfig c;
  kv.get("scene", c.scene);
  kv.get("n_landmarks", c.n_landmarks);
  double box = 0.0;
  kv.get("box_extent", box);
  if (box > 0.0) c.box_extent.setConstant(box);
  kv.get("box_x", c.box_extent.x());
  kv.get("box_y", c.box_extent.y());
  kv.get("box_z", c.box_extent.z());
  kv.get("descriptor_dim", c.descriptor_dim);
  kv.get("descriptor_noise", c.descriptor_noise);
  kv.get("pixel_noise", c.pixel_noise);
  kv.get("max_similarity", c.max_similarity);
  kv.get("score_jitter", c.score_jitter);
  kv.get("n_train_views", c.n_train_views);
  kv.get("n_test_views", c.n_test_views);
  kv.get("radius_min", c.radius_min);
  kv.get("radius_max", c.radius_max);
  kv.get("height_min", c.height_min);
  kv.get("height_max", c.height_max);
  kv.get("target_jitter", c.target_jitter);
  kv.get("outlier_fraction", c.outlier_fraction);
  kv.get("fx", c.intrinsics.fx);
  kv.get("fy", c.intrinsics.fy);
  kv.get("cx", c.intrinsics.cx);
  kv.get("cy", c.intrinsics.cy);
  kv.get("width", c.width);
  kv.get("height", c.height);
  kv.get("seed", c.seed);
  kv.require_all_used();
  c.validate();
  return c;
}

inline void print_config(std::ostream& out, const SynthConfig& c) {
  out << "scene = " << c.scene << '\n'
      << "n_landmarks = " << c.n_landmarks << '\n'
      << "box_x = " << c.box_extent.x() << '\n'
      << "box_y = " << c.box_extent.y() << '\n'
      << "box_z = " << c.box_extent.z() << '\n'
      << "descriptor_dim = " << c.descriptor_dim << '\n'
      << "descriptor_noise = " << c.descriptor_noise << '\n'
      << "pixel_noise = " << c.pixel_noise << '\n'
      << "max_similarity = " << c.max_similarity << '\n'
      << "score_jitter = " << c.score_jitter << '\n'
      << "n_train_views = " << c.n_train_views << '\n'
      << "n_test_views = " << c.n_test_views << '\n'
      << "radius_min = " << c.radius_min << '\n'
      << "radius_max = " << c.radius_max << '\n'
      << "height_min = " << c.height_min << '\n'
      << "height_max = " << c.height_max << '\n'
      << "target_jitter = " << c.target_jitter << '\n'
      << "outlier_fraction = " << c.outlier_fraction << '\n'
      << "fx = " << c.intrinsics.fx << '\n'
      << "fy = " << c.intrinsics.fy << '\n'
      << "cx = " << c.intrinsics.cx << '\n'
      << "cy = " << c.intrinsics.cy << '\n'
      << "width = " << c.width << '\n'
      << "height = " << c.height << '\n'
      << "seed = " << c.seed << '\n';
}

}  // namespace f2m::synth
