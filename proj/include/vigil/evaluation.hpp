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

#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "vigil/core.hpp"

namespace vigil {

// ---------------------------------------------------------------------------
// Detection matching
// ---------------------------------------------------------------------------

struct ClassMatchStats {
  /// Raw predictions of the class, before NMS filtering.
  std::size_t detected_count = 0;
  /// Predictions left after NMS filtering.
  std::size_t surviving_count = 0;
  std::size_t gt_count = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  /// Includes badbox matches, so tp + fn == gt_count.
  std::size_t fn = 0;
  /// Ground truths whose best prediction failed the IoU or size criteria.
  std::size_t badbox = 0;
  double iou_sum = 0.0;

  double mean_iou() const { return tp == 0 ? 0.0 : iou_sum / static_cast<double>(tp); }
  double precision() const;
  double recall() const;
  double f1() const;
};

struct MatchReport {
  EvalConfig config;
  /// One entry per object class, in registry order.
  std::vector<std::pair<ObjectClass, ClassMatchStats>> per_class;

  const ClassMatchStats& at(const ObjectClass& cls) const;
  ClassMatchStats total() const;
};

/// Compares predictions against ground-truth boxes.
///
/// Predictions are NMS-filtered with the configured confidence and overlap.
/// Ground truths are visited largest first (input order on ties); each takes
/// the unmatched surviving prediction of its class and frame with the highest
/// positive IoU. The match is a true positive when that IoU lies in
/// [iou_min, iou_max] and the prediction's shorter side is at least
/// min_box_size, otherwise a badbox (also counted in fn). Ground truths
/// without any overlapping candidate are false negatives, surviving
/// predictions never taken are false positives.
MatchReport match_detections(std::span<const Detection> gt, std::span<const Detection> preds,
                             const EvalConfig& cfg,
                             const ObjectRegistry& objects = default_object_registry());

nlohmann::json to_json(const MatchReport& report);
void write_csv(std::ostream& out, const MatchReport& report);

// ---------------------------------------------------------------------------
// Classification metrics
// ---------------------------------------------------------------------------

struct Prf {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Harmonic mean; 0 when p + r == 0.
double f1_score(double precision, double recall);

/// Zero denominators yield 0.
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

using CountMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct ConfusionMatrix {
  std::vector<ClassLabel> labels;
  /// counts(truth, predicted)
  CountMatrix counts;
  /// Row-normalized counts; rows without samples are zero.
  Eigen::MatrixXd rates;
  std::vector<bool> empty_rows;
};

/// Throws ShapeMismatch on differing lengths, UnknownClass on labels
/// outside `registry`.
ConfusionMatrix confusion(std::span<const ClassLabel> truths,
                          std::span<const ClassLabel> predictions,
                          const LabelRegistry& registry);

enum class EvalMode { PerVideo, PerSequence };

struct ClassificationReport {
  EvalMode mode = EvalMode::PerSequence;
  ConfusionMatrix matrix;
  /// One-vs-rest metrics per label, registry order.
  std::vector<std::pair<ClassLabel, Prf>> per_class;
  double accuracy = 0.0;
  std::size_t elements = 0;
};

/// Scores alerts against ground truth. PerSequence keys `truth` by
/// window_id and takes every alert; PerVideo keys it by video_id and
/// requires exactly one alert per video. Missing truth raises LabelGap.
/// With ClassMode::Binary both sides are collapsed to normal/abnormal first.
ClassificationReport evaluate_alerts(std::span<const Alert> alerts,
                                     const std::map<std::size_t, ClassLabel>& truth,
                                     EvalMode mode,
                                     const LabelRegistry& labels = default_label_registry(),
                                     ClassMode class_mode = ClassMode::MultiClass);

nlohmann::json to_json(const ConfusionMatrix& matrix);
nlohmann::json to_json(const ClassificationReport& report);

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

struct TimingReport {
  std::vector<double> per_window_ms;
  double average_detection_time_ms = 0.0;
  double total_processing_ms = 0.0;
  /// Source video length in seconds (n_frames / fps); informational.
  double video_duration_s = 0.0;
  double fps = 0.0;
};

double mean(std::span<const double> values);

/// Wall-clock time of `step(window)` per window, on the calling thread.
template <class Step>
TimingReport bench(Step&& step, std::span<const SequenceWindow> windows,
                   std::size_t n_frames = 0, double fps = 0.0) {
  using clock = std::chrono::steady_clock;
  TimingReport report;
  report.fps = fps;
  report.video_duration_s = fps > 0.0 ? static_cast<double>(n_frames) / fps : 0.0;
  report.per_window_ms.reserve(windows.size());
  const auto start = clock::now();
  for (const auto& window : windows) {
    const auto t0 = clock::now();
    step(window);
    const auto t1 = clock::now();
    report.per_window_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  report.total_processing_ms =
      std::chrono::duration<double, std::milli>(clock::now() - start).count();
  report.average_detection_time_ms = mean(report.per_window_ms);
  return report;
}

nlohmann::json to_json(const TimingReport& report);
TimingReport timing_from_json(const nlohmann::json& j);

/// Column headers of the human-readable timing table.
inline constexpr const char* kTimingColumns[] = {"Video Duration", "Video FPS",
                                                 "Average Detection Time",
                                                 "Total Processing Time"};

/// Pipe-separated table, header plus one row per report.
void write_timing_table(std::ostream& out, std::span<const TimingReport> reports);

}  // namespace vigil
