#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "f2m/core/error.hpp"
#include "f2m/core/seed.hpp"
#include "f2m/data/dataset.hpp"
#include "f2m/data/frame_io.hpp"
#include "f2m/eval/benchmark.hpp"
#include "f2m/geometry/ransac.hpp"
#include "f2m/regressor/model_io.hpp"
#include "f2m/regressor/train.hpp"
#include "f2m/synth/config.hpp"

namespace f2m::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct TrainOptions {
  std::string arch = "tiny";
  TrainConfig train;
  std::size_t train_cap = 2048;
};

struct EvalOptions {
  RansacConfig ransac;
  std::size_t desc_count = 2048;
  std::size_t threads = 0;  // 0: F2M_THREADS, else hardware
};

inline std::vector<std::size_t> arch_dims(const std::string& arch, std::size_t input_dim) {
  if (arch == "full") return presets::full(input_dim);
  if (arch == "tiny") return presets::tiny(input_dim);
  throw Error(ErrorCode::InvalidInput, "unknown architecture '" + arch + "' (expected full or tiny)");
}

/// Labelled train-split frames capped to the top `cap` keypoints each.
inline std::vector<DescriptorSet> training_frames(const SceneDataset& ds, std::size_t cap) {
  std::vector<DescriptorSet> frames;
  for (auto i : ds.indices(Split::Train)) frames.push_back(top_k_descriptors(ds.frames[i], cap));
  return frames;
}

inline FitResult train_on(const SceneDataset& ds, const TrainOptions& opt, std::ostream& log) {
  const auto dims = arch_dims(opt.arch, ds.manifest.descriptor_dim);
  const MlpRegressor init = init_uniform(dims, opt.train.seed);
  const auto frames = training_frames(ds, opt.train_cap);
  log << "training " << param_count(init) << " parameters on " << frames.size() << " frames\n";
  const std::size_t every = std::max<std::size_t>(1, opt.train.epochs / 20);
  return fit(init, frames, opt.train, [&](const EpochStats& s) {
    if (s.epoch % every == 0 || s.epoch + 1 == opt.train.epochs)
      log << "epoch " << s.epoch << " lr " << s.lr << " loss " << s.mean_loss << '\n' << std::flush;
  });
}

inline EvalReport evaluate_on(const MlpRegressor& model, const SceneDataset& ds, const EvalOptions& opt) {
  BenchmarkOptions bo;
  bo.desc_count = opt.desc_count;
  bo.threads = opt.threads;
  return run_benchmark(model, ds, opt.ransac, bo);
}

inline std::string csv_path_for(const fs::path& json_path) {
  fs::path p = json_path;
  p.replace_extension(".csv");
  return p.string();
}

inline void print_summary(std::ostream& out, const EvalReport& r) {
  out << "median " << r.median_m << " m, " << r.median_deg << " deg; acc(3cm,3deg) " << r.acc_3cm3deg
      << "%, acc(5cm,5deg) " << r.acc_5cm5deg << "%, acc(10cm,5deg) " << r.acc_10cm5deg << "%; failures "
      << r.failures << "/" << r.per_frame.size() << '\n';
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof())
      throw Error(ErrorCode::InvalidInput, "cannot parse list element '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "empty list");
  return out;
}

inline std::string summary_row(const std::string& setting, const EvalReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << setting << ',' << r.median_m << ',' << r.median_deg << ',' << r.acc_3cm3deg << ','
     << r.acc_5cm5deg << ',' << r.acc_10cm5deg << ',' << r.failures << '\n';
  return os.str();
}

/// Wide layout: one row for the scene, one "median_m/median_deg" column per setting.
inline std::string wide_table(const std::string& scene, const std::vector<std::string>& settings,
                              const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "scene";
  for (const auto& s : settings) os << ',' << s;
  os << '\n' << scene << std::fixed;
  for (const auto& r : reports) os << ',' << std::setprecision(3) << r.median_m << "m " << std::setprecision(2) << r.median_deg << "deg";
  os << '\n';
  return os.str();
}

inline void add_ransac_flags(CLI::App* sub, EvalOptions& opt) {
  sub->add_option("--desc-count", opt.desc_count, "top-scoring keypoints fed to the regressor")->check(CLI::PositiveNumber);
  sub->add_option("--threshold", opt.ransac.max_reproj_error_px, "RANSAC inlier threshold (px)");
  sub->add_option("--max-iters", opt.ransac.max_iterations, "RANSAC iteration cap");
  sub->add_option("--confidence", opt.ransac.confidence, "RANSAC stopping confidence");
  sub->add_option("--threads", opt.threads, "worker threads (0: F2M_THREADS or all cores)");
}

inline void add_train_flags(CLI::App* sub, TrainOptions& opt) {
  sub->add_option("--arch", opt.arch, "network preset")->check(CLI::IsMember({"full", "tiny"}));
  sub->add_option("--epochs", opt.train.epochs, "training epochs");
  sub->add_option("--batch-size", opt.train.batch_size, "frames per optimizer step")->check(CLI::PositiveNumber);
  sub->add_option("--lr", opt.train.lr0, "initial learning rate");
  sub->add_option("--lr-decay", opt.train.lr_decay, "decay applied at each fifth of the run");
  sub->add_option("--weight-decay", opt.train.weight_decay, "L2 coefficient");
  sub->add_option("--train-cap", opt.train_cap, "keypoints kept per training frame")->check(CLI::PositiveNumber);
}

/// Runs one command line. Returns 0 when the requested artifact was fully
/// written, 2 on usage errors, 1 on any other failure.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Sparse-descriptor scene coordinate regression and relocalization toolkit", "f2m"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  std::uint64_t seed = 0;
  std::string data_dir, out_path, model_path, config_path, frame_path, intrinsics_text;
  std::string fractions_text = "1.0,0.8,0.6,0.4,0.2,0.1";
  std::string counts_text = "2048,640,180,40";
  TrainOptions train_opt;
  EvalOptions eval_opt;

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene dataset");
  synth_cmd->add_option("--config", config_path, "key = value configuration file")->required();
  synth_cmd->add_option("--out", out_path, "output dataset directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train a regressor on the train split");
  train_cmd->add_option("--data", data_dir, "dataset directory")->required();
  train_cmd->add_option("--out", out_path, "output model file (.f2mw)")->required();
  std::string trace_path;
  train_cmd->add_option("--trace", trace_path, "loss trace file (default: <out>.loss.csv)");
  add_train_flags(train_cmd, train_opt);

  auto* eval_cmd = app.add_subcommand("eval", "localize the test split and write a report");
  eval_cmd->add_option("--data", data_dir, "dataset directory")->required();
  eval_cmd->add_option("--model", model_path, "model file")->required();
  eval_cmd->add_option("--out", out_path, "report.json path (CSV written alongside)")->required();
  add_ransac_flags(eval_cmd, eval_opt);

  auto* loc_cmd = app.add_subcommand("localize", "estimate the pose of one frame");
  loc_cmd->add_option("--model", model_path, "model file")->required();
  loc_cmd->add_option("--frame", frame_path, "frame file (.f2m)")->required();
  loc_cmd->add_option("--intrinsics", intrinsics_text, "fx,fy,cx,cy")->required();
  add_ransac_flags(loc_cmd, eval_opt);

  auto* frac_cmd = app.add_subcommand("ablate-fraction", "train/evaluate on random fractions of the train split");
  frac_cmd->add_option("--data", data_dir, "dataset directory")->required();
  frac_cmd->add_option("--out", out_path, "output directory")->required();
  frac_cmd->add_option("--fractions", fractions_text, "comma-separated fractions in (0, 1]");
  add_train_flags(frac_cmd, train_opt);
  add_ransac_flags(frac_cmd, eval_opt);

  auto* desc_cmd = app.add_subcommand("ablate-desc", "evaluate one model at several keypoint counts");
  desc_cmd->add_option("--data", data_dir, "dataset directory")->required();
  desc_cmd->add_option("--model", model_path, "model file")->required();
  desc_cmd->add_option("--out", out_path, "output directory")->required();
  desc_cmd->add_option("--counts", counts_text, "comma-separated keypoint counts");
  add_ransac_flags(desc_cmd, eval_opt);

  auto* validate_cmd = app.add_subcommand("validate", "check a dataset against the format invariants");
  validate_cmd->add_option("--data", data_dir, "dataset directory")->required();

  for (auto* sub : app.get_subcommands({})) sub->add_option("--seed", seed, "random seed");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  train_opt.train.seed = seed;
  eval_opt.ransac.seed = seed;
  try {
    if (cmd == synth_cmd) {
      auto cfg = synth::synth_config_from(KeyValues::load(config_path));
      if (cmd->count("--seed")) cfg.seed = seed;
      out << "resolved configuration:\nout = " << out_path << '\n';
      synth::print_config(out, cfg);
      const SceneDataset ds = synth::build_dataset(cfg);
      write_dataset(ds, out_path);
      out << "wrote " << ds.frames.size() << " frames to " << out_path << '\n';
      return kExitOk;
    }

    out << "resolved configuration:\n" << cmd->config_to_str(true, false);
    if (cmd == validate_cmd) {
      const SceneDataset ds = read_dataset(data_dir);
      out << "ok: " << ds.frames.size() << " frames (" << ds.indices(Split::Train).size() << " train, "
          << ds.indices(Split::Test).size() << " test), M = " << ds.manifest.descriptor_dim << '\n';
      return kExitOk;
    }
    if (cmd == train_cmd) {
      const SceneDataset ds = read_dataset(data_dir);
      const FitResult res = train_on(ds, train_opt, out);
      if (trace_path.empty()) {
        fs::path p = out_path;
        p.replace_extension(".loss.csv");
        trace_path = p.string();
      }
      write_loss_trace(res.trace, trace_path);
      save_model(res.model, out_path);
      out << "wrote " << out_path << " and " << trace_path << '\n';
      return kExitOk;
    }
    if (cmd == eval_cmd) {
      const SceneDataset ds = read_dataset(data_dir);
      const MlpRegressor model = load_model(model_path);
      const EvalReport r = evaluate_on(model, ds, eval_opt);
      print_summary(out, r);
      write_report(r, out_path, csv_path_for(out_path));
      out << "wrote " << out_path << '\n';
      return kExitOk;
    }
    if (cmd == loc_cmd) {
      const auto k = parse_list<double>(intrinsics_text);
      if (k.size() != 4) throw Error(ErrorCode::InvalidInput, "--intrinsics needs fx,fy,cx,cy");
      const CameraIntrinsics K{k[0], k[1], k[2], k[3]};
      const MlpRegressor model = load_model(model_path);
      const DescriptorSet frame = read_frame(frame_path);
      const DescriptorSet subset = top_k_descriptors(frame, eval_opt.desc_count);
      const SceneCoordinates coords = forward(model, subset);
      std::vector<Correspondence2D3D> corr;
      for (Eigen::Index i = 0; i < coords.cols(); ++i)
        corr.push_back({subset.keypoints.col(i).cast<double>(), coords.col(i)});
      const RansacResult est = estimate_pose_ransac(corr, K, eval_opt.ransac);
      const auto& q = est.pose.rotation;
      const auto& t = est.pose.translation;
      out << "inliers " << est.num_inliers << '/' << corr.size() << '\n'
          << std::setprecision(17) << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' ' << t.x() << ' '
          << t.y() << ' ' << t.z() << '\n';
      return kExitOk;
    }
    if (cmd == frac_cmd) {
      const auto fractions = parse_list<double>(fractions_text);
      const SceneDataset ds = read_dataset(data_dir);
      fs::create_directories(out_path);
      std::string summary = "fraction,median_m,median_deg,acc_3cm3deg,acc_5cm5deg,acc_10cm5deg,failures\n";
      std::vector<std::string> labels;
      std::vector<EvalReport> reports;
      for (const double f : fractions) {
        // Only train frames are subsampled; the test split stays whole.
        SceneDataset train_part, rest;
        train_part.manifest = rest.manifest = ds.manifest;
        train_part.manifest.frames.clear();
        rest.manifest.frames.clear();
        for (std::size_t i = 0; i < ds.frames.size(); ++i) {
          auto& dst = ds.manifest.frames[i].split == Split::Train ? train_part : rest;
          dst.manifest.frames.push_back(ds.manifest.frames[i]);
          dst.frames.push_back(ds.frames[i]);
        }
        SceneDataset sub = subsample_frames(train_part, f, mix_seed(seed, 0xF4AC));
        for (std::size_t i = 0; i < rest.frames.size(); ++i) {
          sub.manifest.frames.push_back(rest.manifest.frames[i]);
          sub.frames.push_back(rest.frames[i]);
        }
        std::ostringstream label;
        label << f;
        out << "fraction " << label.str() << ": " << sub.indices(Split::Train).size() << " train frames\n";
        const FitResult res = train_on(sub, train_opt, out);
        const EvalReport r = evaluate_on(res.model, sub, eval_opt);
        print_summary(out, r);
        const fs::path base = fs::path(out_path) / ("fraction_" + label.str());
        save_model(res.model, base.string() + ".f2mw");
        write_loss_trace(res.trace, base.string() + ".loss.csv");
        write_report(r, base.string() + ".json", base.string() + ".csv");
        summary += summary_row(label.str(), r);
        labels.push_back(label.str());
        reports.push_back(r);
      }
      io::write_file(fs::path(out_path) / "summary.csv", summary);
      io::write_file(fs::path(out_path) / "table.csv", wide_table(ds.manifest.scene, labels, reports));
      out << "wrote " << (fs::path(out_path) / "summary.csv").string() << '\n';
      return kExitOk;
    }
    if (cmd == desc_cmd) {
      const auto counts = parse_list<std::size_t>(counts_text);
      const SceneDataset ds = read_dataset(data_dir);
      const MlpRegressor model = load_model(model_path);
      fs::create_directories(out_path);
      std::string summary = "desc_count,median_m,median_deg,acc_3cm3deg,acc_5cm5deg,acc_10cm5deg,failures\n";
      std::vector<std::string> labels;
      std::vector<EvalReport> reports;
      for (const auto k : counts) {
        EvalOptions opt = eval_opt;
        opt.desc_count = k;
        const EvalReport r = evaluate_on(model, ds, opt);
        out << "k = " << k << ": ";
        print_summary(out, r);
        const fs::path base = fs::path(out_path) / ("desc_" + std::to_string(k));
        write_report(r, base.string() + ".json", base.string() + ".csv");
        summary += summary_row(std::to_string(k), r);
        labels.push_back(std::to_string(k));
        reports.push_back(r);
      }
      io::write_file(fs::path(out_path) / "summary.csv", summary);
      io::write_file(fs::path(out_path) / "table.csv", wide_table(ds.manifest.scene, labels, reports));
      out << "wrote " << (fs::path(out_path) / "summary.csv").string() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace f2m::cli
