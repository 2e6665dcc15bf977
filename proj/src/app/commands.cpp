// Copyright 2026 The Vigil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vigil/app.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "vigil/backends.hpp"
#include "vigil/config.hpp"
#include "vigil/evaluation.hpp"
#include "vigil/explain.hpp"
#include "vigil/fusion.hpp"
#include "vigil/image.hpp"
#include "vigil/jsonl.hpp"
#include "vigil/scenario.hpp"
#include "vigil/windowing.hpp"

namespace vigil::app {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

/// Thrown for invalid command-line input detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineFlags {
  std::optional<std::string> mode;
  std::optional<std::string> rule;
  bool binary = false;
  std::optional<double> conf;
  std::optional<double> nms_overlap;
  std::optional<std::size_t> frame_skip;
  std::optional<std::size_t> seq_len;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> report;

  void attach(CLI::App& cmd) {
    cmd.add_option("--mode", mode, "serial|parallel");
    cmd.add_option("--rule", rule, "fn|fp");
    cmd.add_flag("--binary", binary, "collapse anomalies into one class");
    cmd.add_option("--conf", conf, "confidence threshold (0.55 or 55)");
    cmd.add_option("--nms-overlap", nms_overlap, "NMS overlap threshold");
    cmd.add_option("--frame-skip", frame_skip, "detect on every n-th frame");
    cmd.add_option("--seq-len", seq_len, "frames per window");
    cmd.add_option("--seed", seed, "scenario seed");
    cmd.add_option("--report", report, "JSON report path");
  }

  void apply(RunConfig& cfg) const {
    try {
      if (mode) cfg.fusion.mode = parse_mode(*mode);
      if (rule) cfg.fusion.rule_variant = parse_rule_variant(*rule);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (binary) cfg.fusion.class_mode = ClassMode::Binary;
    if (conf) cfg.fusion.confidence_threshold = cfg.eval.confidence_threshold = normalize_ratio(*conf);
    if (nms_overlap) cfg.fusion.nms_overlap = cfg.eval.nms_overlap = normalize_ratio(*nms_overlap);
    if (frame_skip) cfg.fusion.frame_skip = *frame_skip;
    if (seq_len) cfg.fusion.sequence_length = cfg.windows.window_len = cfg.windows.target_count = *seq_len;
    if (seed) cfg.scenario.seed = *seed;
    if (report) cfg.report = *report;
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

RunConfig load(const std::string& path, const PipelineFlags& flags) {
  RunConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw UsageError(e.what());
    throw;
  }
  flags.apply(cfg);
  return cfg;
}

json fusion_json(const FusionConfig& f) {
  return {{"mode", to_string(f.mode)},
          {"rule_variant", to_string(f.rule_variant)},
          {"class_mode", f.class_mode == ClassMode::Binary ? "binary" : "multiclass"},
          {"confidence_threshold", f.confidence_threshold},
          {"iou_gate", f.iou_gate == IouGate::DIoU ? "diou" : "iou"},
          {"sequence_length", f.sequence_length},
          {"frame_skip", f.frame_skip},
          {"image_size", f.image_size},
          {"nms_overlap", f.nms_overlap},
          {"touch_counts", f.touch_counts}};
}

json alert_json(const Alert& a) {
  return {{"window", a.window_id},
          {"video", a.video_id},
          {"final", a.final_class.str()},
          {"original", a.original_class.str()},
          {"rule", rule_name(a)},
          {"supporting", a.supporting_detections.size()}};
}

// Frames, windows and (for synthetic input) ground truth for one invocation.
struct Input {
  std::vector<Frame> frames;
  std::vector<Detection> gt;
  std::vector<SequenceWindow> windows;
  std::map<std::size_t, ClassLabel> truth;
  bool synthetic = false;
};

std::vector<fs::path> image_files(const fs::path& path) {
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<Frame> read_frames(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::IoError, "no such path '" + path.string() + "'");
  std::vector<Frame> frames;
  for (const auto& file : image_files(path)) frames.push_back(read_pnm(file, frames.size()));
  return frames;
}

Input make_input(const RunConfig& cfg) {
  Input in;
  if (cfg.frames) {
    in.frames = read_frames(*cfg.frames);
  } else {
    auto scenario = generate_scenario(cfg.scenario);
    in.frames = std::move(scenario.frames);
    in.gt = std::move(scenario.gt_detections);
    in.synthetic = true;
  }
  in.windows = generate_windows(cfg.windows, in.frames.size());
  if (in.synthetic) in.truth = window_labels(cfg.scenario, in.windows);
  return in;
}

struct Backends {
  std::unique_ptr<Detector> base_detector;
  std::unique_ptr<Classifier> base_classifier;
  std::unique_ptr<Detector> delayed_detector;
  std::unique_ptr<Classifier> delayed_classifier;

  Detector& detector() { return delayed_detector ? *delayed_detector : *base_detector; }
  Classifier& classifier() { return delayed_classifier ? *delayed_classifier : *base_classifier; }
};

Backends make_backends(const RunConfig& cfg, const Input& in) {
  const auto labels = default_label_registry();
  const auto objects = default_object_registry();
  std::shared_ptr<const ReplayScript> replay;
  if (cfg.replay) replay = std::make_shared<ReplayScript>(load_replay(*cfg.replay, labels, objects));

  Backends b;
  switch (cfg.detector) {
    case DetectorSource::GroundTruth:
      b.base_detector = std::make_unique<ReplayDetector>(
          std::make_shared<ReplayScript>(replay_from_detections(in.gt)));
      break;
    case DetectorSource::Replay: b.base_detector = std::make_unique<ReplayDetector>(replay); break;
    case DetectorSource::Null: b.base_detector = std::make_unique<NullDetector>(); break;
    case DetectorSource::External:
      b.base_detector = std::make_unique<ExternalDetector>(
          std::make_shared<ExternalProcess>(cfg.detector_command), objects);
      break;
  }
  switch (cfg.classifier) {
    case ClassifierSource::Oracle: {
      auto truth = in.truth;
      b.base_classifier = std::make_unique<FunctionClassifier>(
          [truth, labels](const SequenceWindow& w, std::span<const Frame>) {
            const auto it = truth.find(w.window_id);
            return certain_verdict(w.window_id, labels, it == truth.end() ? labels::normal : it->second);
          });
      break;
    }
    case ClassifierSource::Normal:
      b.base_classifier = std::make_unique<FunctionClassifier>(
          [labels](const SequenceWindow& w, std::span<const Frame>) {
            return certain_verdict(w.window_id, labels, labels::normal);
          });
      break;
    case ClassifierSource::Replay:
      b.base_classifier = std::make_unique<ReplayClassifier>(replay, labels, cfg.fallback);
      break;
    case ClassifierSource::External:
      b.base_classifier = std::make_unique<ExternalClassifier>(
          std::make_shared<ExternalProcess>(cfg.classifier_command), labels);
      break;
  }
  auto micros = [](double ms) { return std::chrono::microseconds(std::llround(ms * 1000.0)); };
  if (cfg.detector_delay_ms > 0)
    b.delayed_detector = std::make_unique<DelayedDetector>(*b.base_detector, micros(cfg.detector_delay_ms));
  if (cfg.classifier_delay_ms > 0)
    b.delayed_classifier =
        std::make_unique<DelayedClassifier>(*b.base_classifier, micros(cfg.classifier_delay_ms));
  return b;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& config_path, const PipelineFlags& flags, std::ostream& out) {
  const auto cfg = load(config_path, flags);
  const auto in = make_input(cfg);
  auto backends = make_backends(cfg, in);
  const Pipeline pipeline(cfg.fusion, backends.detector(), backends.classifier(),
                          KeyObjectDictionary::defaults(), cfg.preprocess);

  json report = {{"v", 1},
                 {"config", fusion_json(cfg.fusion)},
                 {"generator", to_string(cfg.windows.mode)},
                 {"frames", in.frames.size()},
                 {"alerts", json::array()}};
  std::vector<Alert> alerts;
  for (const auto& w : in.windows) {
    alerts.push_back(pipeline.process(w, in.frames));
    const auto line = alert_json(alerts.back());
    out << line.dump() << '\n';
    report["alerts"].push_back(line);
  }
  if (in.synthetic && !alerts.empty()) {
    const auto mode = cfg.windows.mode == WindowGenerator::DynamicStep ? EvalMode::PerVideo
                                                                        : EvalMode::PerSequence;
    report["evaluation"] =
        to_json(evaluate_alerts(alerts, in.truth, mode, default_label_registry(), cfg.fusion.class_mode));
  }
  if (cfg.report) write_json(*cfg.report, report);
  return kOk;
}

int cmd_bench(const std::string& config_path, const PipelineFlags& flags, std::ostream& out) {
  const auto cfg = load(config_path, flags);
  TimingReport timing;
  timing.fps = cfg.windows.fps;
  try {
    const auto in = make_input(cfg);
    auto backends = make_backends(cfg, in);
    const Pipeline pipeline(cfg.fusion, backends.detector(), backends.classifier(),
                            KeyObjectDictionary::defaults(), cfg.preprocess);
    timing = bench([&](const SequenceWindow& w) { pipeline.process(w, in.frames); }, in.windows,
                   in.frames.size(), cfg.windows.fps);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::VideoTooShort) throw;
  }
  std::vector<TimingReport> rows;
  if (!timing.per_window_ms.empty()) rows.push_back(timing);
  write_timing_table(out, rows);
  if (cfg.report)
    write_json(*cfg.report, {{"v", 1}, {"config", fusion_json(cfg.fusion)}, {"timing", to_json(timing)}});
  return kOk;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, const EvalConfig& cfg,
             const std::optional<std::string>& report, const std::optional<std::string>& csv,
             std::ostream& out) {
  const auto objects = default_object_registry();
  const auto gt = read_detections_file(gt_path, objects, false);
  const auto preds = read_detections_file(pred_path, objects, true);
  const auto result = match_detections(gt, preds, cfg, objects);

  write_csv(out, result);  // starts with the config header
  if (report) write_json(*report, to_json(result));
  if (csv) {
    std::ofstream f(*csv);
    if (!f) throw Error(ErrorKind::IoError, "cannot write '" + *csv + "'");
    write_csv(f, result);
  }
  return kOk;
}

int cmd_explain(const std::string& frames_path, const std::string& heatmaps_path, double alpha,
                double level, const std::string& out_dir, std::ostream& out) {
  const auto frames = read_frames(frames_path);
  std::ifstream hin(heatmaps_path);
  if (!hin) throw Error(ErrorKind::IoError, "cannot open '" + heatmaps_path + "'");
  const auto records = read_heatmaps(hin);

  std::vector<Frame> selected;
  std::vector<Heatmap> maps;
  for (const auto& r : records) {
    if (r.frame >= frames.size())
      throw Error(ErrorKind::InvalidParam, "heatmap for frame " + std::to_string(r.frame) +
                                               " but only " + std::to_string(frames.size()) +
                                               " frames");
    selected.push_back(frames[r.frame]);
    maps.push_back(r.values);
  }
  const auto explained = map_series(selected, maps, alpha, level);

  fs::create_directories(out_dir);
  json all = json::array();
  for (std::size_t i = 0; i < explained.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "overlay_%05zu.%s", records[i].frame,
                  explained[i].overlay.channels == 1 ? "pgm" : "ppm");
    write_pnm(fs::path(out_dir) / name, explained[i].overlay);
    all.push_back({{"frame", records[i].frame},
                   {"level", level},
                   {"contours", contours_to_json(explained[i].contours)}});
    out << "frame " << records[i].frame << ": " << explained[i].contours.size() << " contours\n";
  }
  write_json(fs::path(out_dir) / "contours.json", all);
  return kOk;
}

int cmd_scenario(const std::string& config_path, const PipelineFlags& flags,
                 const std::string& out_dir, std::ostream& out) {
  auto cfg = load(config_path, flags);
  cfg.frames.reset();
  const auto in = make_input(cfg);
  fs::create_directories(out_dir);
  for (const auto& f : in.frames) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.%s", f.index, f.channels == 1 ? "pgm" : "ppm");
    write_pnm(fs::path(out_dir) / name, f);
  }
  {
    std::ofstream gt(fs::path(out_dir) / "gt.jsonl");
    write_detections(gt, in.gt);
  }
  std::ofstream labels(fs::path(out_dir) / "labels.jsonl");
  for (const auto& [id, label] : in.truth)
    labels << json{{"v", 1}, {"window", id}, {"label", label.str()}}.dump() << '\n';
  out << in.frames.size() << " frames, " << in.gt.size() << " boxes, " << in.windows.size()
      << " windows\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"vigil: anomaly detection pipeline toolkit", "vigil"};
  app.require_subcommand(1);

  std::string config_path;
  PipelineFlags run_flags, bench_flags, scenario_flags;

  auto* run_cmd = app.add_subcommand("run", "run the pipeline and print one alert per window");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_flags.attach(*run_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "time the pipeline per window");
  bench_cmd->add_option("config", config_path, "config file")->required();
  bench_flags.attach(*bench_cmd);

  std::string gt_path, pred_path;
  EvalConfig eval_cfg;
  std::optional<std::string> eval_report, eval_csv;
  auto* eval_cmd = app.add_subcommand("eval", "match predicted boxes against ground truth");
  eval_cmd->add_option("gt", gt_path, "ground-truth detections (JSONL)")->required();
  eval_cmd->add_option("pred", pred_path, "predicted detections (JSONL)")->required();
  eval_cmd->add_option("--conf", eval_cfg.confidence_threshold, "confidence threshold");
  eval_cmd->add_option("--nms-overlap", eval_cfg.nms_overlap, "NMS overlap threshold");
  eval_cmd->add_option("--iou-min", eval_cfg.iou_min, "minimum IoU for a true positive");
  eval_cmd->add_option("--iou-max", eval_cfg.iou_max, "maximum IoU for a true positive");
  eval_cmd->add_option("--min-box", eval_cfg.min_box_size, "minimum box side in pixels");
  eval_cmd->add_option("--report", eval_report, "JSON report path");
  eval_cmd->add_option("--csv", eval_csv, "CSV report path");

  std::string frames_path, heatmaps_path, explain_out = "explain_out";
  double alpha = 0.5, level = 0.5;
  auto* explain_cmd = app.add_subcommand("explain", "overlay heatmaps and extract contours");
  explain_cmd->add_option("frames", frames_path, "PPM/PGM file or directory")->required();
  explain_cmd->add_option("heatmaps", heatmaps_path, "heatmap JSONL")->required();
  explain_cmd->add_option("--alpha", alpha, "overlay opacity in [0, 1]");
  explain_cmd->add_option("--level", level, "contour level in (0, 1)");
  explain_cmd->add_option("--out", explain_out, "output directory");

  std::string scenario_out = "scenario_out";
  auto* scenario_cmd = app.add_subcommand("scenario", "render a synthetic scenario to disk");
  scenario_cmd->add_option("config", config_path, "config file")->required();
  scenario_cmd->add_option("--out", scenario_out, "output directory");
  scenario_flags.attach(*scenario_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, run_flags, out);
    if (*bench_cmd) return cmd_bench(config_path, bench_flags, out);
    if (*eval_cmd) {
      eval_cfg.confidence_threshold = normalize_ratio(eval_cfg.confidence_threshold);
      eval_cfg.nms_overlap = normalize_ratio(eval_cfg.nms_overlap);
      eval_cfg.iou_min = normalize_ratio(eval_cfg.iou_min);
      eval_cfg.iou_max = normalize_ratio(eval_cfg.iou_max);
      try {
        eval_cfg.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      return cmd_eval(gt_path, pred_path, eval_cfg, eval_report, eval_csv, out);
    }
    if (*explain_cmd) {
      if (!(level > 0.0 && level < 1.0)) throw UsageError("--level must lie strictly between 0 and 1");
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
      return cmd_explain(frames_path, heatmaps_path, alpha, level, explain_out, out);
    }
    if (*scenario_cmd) return cmd_scenario(config_path, scenario_flags, scenario_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace vigil::app
