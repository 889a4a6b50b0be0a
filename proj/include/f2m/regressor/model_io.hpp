#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "f2m/core/binary_io.hpp"
#include "f2m/regressor/mlp.hpp"

namespace f2m {

// Layout: "F2MW", u32 version, u32 layer count L, (L + 1) u32 layer dims,
// then for each layer the out x in weights row-major as f64 followed by the
// out f64 biases.
inline constexpr std::string_view kModelMagic = "F2MW";
inline constexpr std::uint32_t kModelVersion = 1;

inline std::vector<char> encode_model(const MlpRegressor& model) {
  model.validate();
  std::vector<char> buf;
  io::put_bytes(buf, kModelMagic);
  io::put_le<std::uint32_t>(buf, kModelVersion);
  io::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(model.num_layers()));
  for (auto d : model.layer_dims) io::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) io::put_le<double>(buf, w(r, c));
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) io::put_le<double>(buf, model.biases[l](r));
  }
  return buf;
}

inline MlpRegressor decode_model(io::Reader& in) {
  if (in.get_bytes(4) != kModelMagic) in.fail("bad magic (expected F2MW)");
  const auto version = in.get<std::uint32_t>();
  if (version != kModelVersion) in.fail("unsupported model version " + std::to_string(version));
  const auto layers = in.get<std::uint32_t>();
  if (layers == 0 || layers > 1024) in.fail("implausible layer count " + std::to_string(layers));
  std::vector<std::size_t> dims;
  for (std::uint32_t i = 0; i <= layers; ++i) dims.push_back(in.get<std::uint32_t>());
  const std::size_t expected_bytes = param_count(dims) * sizeof(double);
  if (in.remaining() != expected_bytes)
    in.fail("payload holds " + std::to_string(in.remaining()) + " bytes, layer dims imply " +
            std::to_string(expected_bytes));
  MlpRegressor model;
  try {
    model = MlpRegressor(dims);
  } catch (const Error& e) {
    in.fail(e.what());
  }
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = in.get<double>();
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) model.biases[l](r) = in.get<double>();
  }
  return model;
}

inline void save_model(const MlpRegressor& model, const std::filesystem::path& path) {
  io::write_file(path, encode_model(model));
}

inline MlpRegressor load_model(const std::filesystem::path& path) {
  io::Reader in(io::read_file(path), path.string());
  return decode_model(in);
}

}  // namespace f2m
