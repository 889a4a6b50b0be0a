#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "f2m/core/binary_io.hpp"
#include "f2m/core/error.hpp"
#include "f2m/core/seed.hpp"
#include "f2m/data/dataset.hpp"
#include "f2m/eval/metrics.hpp"
#include "f2m/geometry/ransac.hpp"
#include "f2m/regressor/mlp.hpp"

namespace f2m {

struct BenchmarkOptions {
  std::size_t desc_count = 2048;  // top-k keypoints fed to the regressor
  std::size_t threads = 1;        // 0 = hardware concurrency
};

struct FrameResult {
  std::string id;
  bool localized = false;
  PoseError error{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  std::size_t inliers = 0;
  std::size_t correspondences = 0;
  double regression_ms = 0.0;
  double pose_ms = 0.0;
  std::string failure;
};

struct EvalReport {
  std::string scene;
  std::size_t model_params = 0;
  std::size_t desc_count = 0;
  std::vector<FrameResult> per_frame;
  double median_m = std::numeric_limits<double>::quiet_NaN();
  double median_deg = std::numeric_limits<double>::quiet_NaN();
  // Percent of all frames; failed frames count as misses.
  double acc_3cm3deg = 0.0;
  double acc_5cm5deg = 0.0;
  double acc_10cm5deg = 0.0;
  std::size_t failures = 0;
  double regression_ms_mean = 0.0;
  double pose_ms_mean = 0.0;
};

struct TestFrame {
  const DescriptorSet* frame;
  Pose truth;
};

/// Worker count: explicit request, else F2M_THREADS, else hardware.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested == 0) {
    if (const char* env = std::getenv("F2M_THREADS")) requested = std::strtoul(env, nullptr, 10);
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

inline FrameResult localize_frame(const MlpRegressor& model, const DescriptorSet& frame, const Pose& truth,
                                  const CameraIntrinsics& K, const RansacConfig& ransac, std::size_t desc_count) {
  using clock = std::chrono::steady_clock;
  FrameResult r;
  r.id = frame.frame_id;
  const auto t0 = clock::now();
  const DescriptorSet subset = top_k_descriptors(frame, desc_count);
  const SceneCoordinates coords = forward(model, subset);
  const auto t1 = clock::now();
  std::vector<Correspondence2D3D> corr;
  corr.reserve(subset.size());
  for (Eigen::Index i = 0; i < coords.cols(); ++i)
    corr.push_back({subset.keypoints.col(i).cast<double>(), coords.col(i)});
  r.correspondences = corr.size();
  try {
    const RansacResult est = estimate_pose_ransac(corr, K, ransac);
    r.localized = true;
    r.inliers = est.num_inliers;
    r.error = pose_error(est.pose, truth);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::LocalizationFailure) throw;
    r.failure = e.what();
  }
  const auto t2 = clock::now();
  r.regression_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  r.pose_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  return r;
}

/// Per frame: top-k -> regress -> RANSAC -> error against truth. RANSAC
/// for frame i is seeded with mix(ransac.seed, i), so results do not depend
/// on the thread count.
inline EvalReport run_benchmark(const MlpRegressor& model, const std::vector<TestFrame>& frames,
                                const CameraIntrinsics& K, const RansacConfig& ransac,
                                const BenchmarkOptions& options = {}) {
  if (frames.empty()) throw Error(ErrorCode::DegenerateInput, "empty test set");
  if (options.desc_count < 1) throw Error(ErrorCode::InvalidInput, "desc_count must be >= 1");
  model.validate();
  ransac.validate();

  EvalReport report;
  report.model_params = param_count(model);
  report.desc_count = options.desc_count;
  report.per_frame.resize(frames.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < frames.size(); i = next++) {
      try {
        RansacConfig cfg = ransac;
        cfg.seed = mix_seed(ransac.seed, i);
        report.per_frame[i] = localize_frame(model, *frames[i].frame, frames[i].truth, K, cfg, options.desc_count);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(resolve_threads(options.threads), frames.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<PoseError> localized;
  std::vector<PoseError> all;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& r : report.per_frame) {
    report.regression_ms_mean += r.regression_ms / static_cast<double>(frames.size());
    report.pose_ms_mean += r.pose_ms / static_cast<double>(frames.size());
    if (r.localized) {
      localized.push_back(r.error);
      all.push_back(r.error);
    } else {
      ++report.failures;
      all.push_back({inf, inf});
    }
  }
  if (!localized.empty()) {
    const PoseError med = median_errors(localized);
    report.median_m = med.meters;
    report.median_deg = med.degrees;
  }
  report.acc_3cm3deg = accuracy_at(all, 0.03, 3.0);
  report.acc_5cm5deg = accuracy_at(all, 0.05, 5.0);
  report.acc_10cm5deg = accuracy_at(all, 0.10, 5.0);
  return report;
}

/// Benchmark on the test split of a dataset.
inline EvalReport run_benchmark(const MlpRegressor& model, const SceneDataset& ds, const RansacConfig& ransac,
                                const BenchmarkOptions& options = {}) {
  std::vector<TestFrame> frames;
  for (auto i : ds.indices(Split::Test)) {
    if (!ds.manifest.frames[i].pose)
      throw Error(ErrorCode::InvalidInput, "test frame '" + ds.manifest.frames[i].id + "' has no ground-truth pose");
    frames.push_back({&ds.frames[i], *ds.manifest.frames[i].pose});
  }
  EvalReport r = run_benchmark(model, frames, ds.manifest.intrinsics, ransac, options);
  r.scene = ds.manifest.scene;
  return r;
}

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["scene"] = r.scene;
  j["model_params"] = r.model_params;
  j["desc_count"] = r.desc_count;
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : r.per_frame) {
    nlohmann::ordered_json fj;
    fj["id"] = f.id;
    fj["err_m"] = detail::number_or_null(f.error.meters);
    fj["err_deg"] = detail::number_or_null(f.error.degrees);
    fj["inliers"] = f.inliers;
    fj["time_ms"] = f.regression_ms + f.pose_ms;
    fj["localized"] = f.localized;
    if (!f.localized) fj["failure"] = f.failure;
    frames.push_back(std::move(fj));
  }
  j["per_frame"] = std::move(frames);
  j["median_m"] = detail::number_or_null(r.median_m);
  j["median_deg"] = detail::number_or_null(r.median_deg);
  j["acc_3cm3deg"] = r.acc_3cm3deg;
  j["acc_5cm5deg"] = r.acc_5cm5deg;
  j["acc_10cm5deg"] = r.acc_10cm5deg;
  j["failures"] = r.failures;
  j["regression_ms_mean"] = r.regression_ms_mean;
  j["pose_ms_mean"] = r.pose_ms_mean;
  return j;
}

/// Report JSON with wall-clock fields removed, for reproducibility checks.
inline nlohmann::ordered_json without_timings(nlohmann::ordered_json j) {
  j.erase("regression_ms_mean");
  j.erase("pose_ms_mean");
  for (auto& f : j["per_frame"]) f.erase("time_ms");
  return j;
}

inline void write_report(const EvalReport& r, const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path) {
  io::write_file(json_path, report_to_json(r).dump(2) + "\n");
  std::ostringstream csv;
  csv << "id,err_m,err_deg,inliers\n" << std::setprecision(17);
  for (const auto& f : r.per_frame) {
    csv << f.id << ',';
    if (f.localized)
      csv << f.error.meters << ',' << f.error.degrees;
    else
      csv << "nan,nan";
    csv << ',' << f.inliers << '\n';
  }
  io::write_file(csv_path, csv.str());
}

}  // namespace f2m
