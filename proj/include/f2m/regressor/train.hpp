#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "f2m/core/binary_io.hpp"
#include "f2m/core/error.hpp"
#include "f2m/core/seed.hpp"
#include "f2m/core/types.hpp"
#include "f2m/regressor/adam.hpp"
#include "f2m/regressor/loss.hpp"
#include "f2m/regressor/mlp.hpp"

namespace f2m {

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;  // over every valid descriptor seen in the epoch
};

using LossTrace = std::vector<EpochStats>;

struct FitResult {
  MlpRegressor model;
  LossTrace trace;
};

namespace detail {

struct TrainingFrame {
  Eigen::MatrixXd inputs;
  SceneCoordinates gt;
  std::vector<std::uint8_t> validity;
};

}  // namespace detail

/// Mini-batch training on the coordinate loss. Frames are reshuffled every
/// epoch from one stream seeded by config.seed; each step pools the valid
/// descriptors of batch_size frames. Frames without labels are skipped.
/// With config.sample_per_frame set, each frame contributes a random subset
/// drawn from a second stream instead of all its descriptors.
inline FitResult fit(MlpRegressor model, const std::vector<DescriptorSet>& frames, const TrainConfig& config,
                     const std::function<void(const EpochStats&)>& on_epoch = {}) {
  config.validate();
  model.validate();

  std::vector<detail::TrainingFrame> data;
  for (const auto& f : frames) {
    f.check();
    if (!f.gt || f.gt->valid_count() == 0) continue;
    if (f.dim() != model.input_dim())
      throw Error(ErrorCode::InvalidInput, "frame '" + f.frame_id + "' descriptor dimension " +
                                               std::to_string(f.dim()) + " does not match network input");
    data.push_back({f.descriptors.cast<double>(), f.gt->coords.cast<double>(), f.gt->validity});
  }
  if (data.empty()) throw Error(ErrorCode::DegenerateInput, "no frames with valid ground-truth coordinates");

  FitResult result{std::move(model), {}};
  if (config.epochs == 0) return result;

  AdamState state = AdamState::for_model(result.model);
  std::mt19937_64 rng(config.seed);
  std::mt19937_64 sample_rng(mix_seed(config.seed, 1));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  Eigen::MatrixXd inputs;
  SceneCoordinates gt;
  std::vector<std::uint8_t> validity;
  std::vector<std::vector<Eigen::Index>> picks(data.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = schedule_lr(epoch, config);
    std::shuffle(order.begin(), order.end(), rng);
    if (config.sample_per_frame > 0) {
      for (std::size_t i = 0; i < data.size(); ++i) {
        auto& p = picks[i];
        p.resize(static_cast<std::size_t>(data[i].inputs.cols()));
        std::iota(p.begin(), p.end(), Eigen::Index{0});
        const std::size_t n = std::min(p.size(), config.sample_per_frame);
        for (std::size_t j = 0; j < n; ++j)
          std::swap(p[j], p[std::uniform_int_distribution<std::size_t>(j, p.size() - 1)(sample_rng)]);
        p.resize(n);
        std::sort(p.begin(), p.end());
      }
    }

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      auto width = [&](std::size_t f) {
        return config.sample_per_frame > 0 ? static_cast<Eigen::Index>(picks[f].size()) : data[f].inputs.cols();
      };
      Eigen::Index cols = 0;
      for (std::size_t i = begin; i < end; ++i) cols += width(order[i]);
      inputs.resize(static_cast<Eigen::Index>(result.model.input_dim()), cols);
      gt.resize(3, cols);
      validity.clear();
      Eigen::Index at = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& f = data[order[i]];
        if (config.sample_per_frame > 0) {
          for (const Eigen::Index c : picks[order[i]]) {
            inputs.col(at) = f.inputs.col(c);
            gt.col(at) = f.gt.col(c);
            validity.push_back(f.validity[static_cast<std::size_t>(c)]);
            ++at;
          }
          continue;
        }
        inputs.middleCols(at, f.inputs.cols()) = f.inputs;
        gt.middleCols(at, f.gt.cols()) = f.gt;
        validity.insert(validity.end(), f.validity.begin(), f.validity.end());
        at += f.inputs.cols();
      }
      LossGradient lg;
      try {
        lg = backward(result.model, inputs, gt, validity);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateInput) continue;  // subset drew only invalid entries
        throw;
      }
      loss_sum += lg.loss * static_cast<double>(lg.valid);
      loss_count += lg.valid;
      adam_step(result.model, lg.grads, state, lr, config);
    }
    EpochStats stats{epoch, lr, loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0};
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

/// One "epoch,lr,mean_loss" line per epoch.
inline void write_loss_trace(const LossTrace& trace, const std::filesystem::path& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& s : trace) out << s.epoch << ',' << s.lr << ',' << s.mean_loss << '\n';
  io::write_file(path, out.str());
}

}  // namespace f2m
