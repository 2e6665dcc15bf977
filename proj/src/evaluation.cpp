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

#include "vigil/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "vigil/geometry.hpp"

namespace vigil {

using nlohmann::json;

double ClassMatchStats::precision() const {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double ClassMatchStats::recall() const {
  return gt_count == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gt_count);
}

double ClassMatchStats::f1() const { return f1_score(precision(), recall()); }

const ClassMatchStats& MatchReport::at(const ObjectClass& cls) const {
  for (const auto& [id, stats] : per_class)
    if (id == cls) return stats;
  throw Error(ErrorKind::UnknownClass, "no statistics for class '" + cls.str() + "'");
}

ClassMatchStats MatchReport::total() const {
  ClassMatchStats sum;
  for (const auto& [id, s] : per_class) {
    sum.detected_count += s.detected_count;
    sum.surviving_count += s.surviving_count;
    sum.gt_count += s.gt_count;
    sum.tp += s.tp;
    sum.fp += s.fp;
    sum.fn += s.fn;
    sum.badbox += s.badbox;
    sum.iou_sum += s.iou_sum;
  }
  return sum;
}

MatchReport match_detections(std::span<const Detection> gt, std::span<const Detection> preds,
                             const EvalConfig& cfg, const ObjectRegistry& objects) {
  cfg.validate();
  MatchReport report;
  report.config = cfg;
  for (const auto& cls : objects.ids()) report.per_class.emplace_back(cls, ClassMatchStats{});
  auto stats_of = [&](const ObjectClass& cls) -> ClassMatchStats& {
    return report.per_class[objects.index_of(cls)].second;
  };

  for (const auto& p : preds) ++stats_of(p.object_class).detected_count;
  for (const auto& g : gt) {
    check_box(g.box);
    ++stats_of(g.object_class).gt_count;
  }

  const std::vector<Detection> surviving =
      nms(preds, cfg.confidence_threshold, cfg.nms_overlap, objects);
  for (const auto& p : surviving) ++stats_of(p.object_class).surviving_count;

  std::vector<std::size_t> order(gt.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return area(gt[a].box) > area(gt[b].box);
  });

  std::vector<bool> taken(surviving.size(), false);
  for (std::size_t gi : order) {
    const Detection& truth = gt[gi];
    ClassMatchStats& stats = stats_of(truth.object_class);

    std::ptrdiff_t best = -1;
    double best_iou = 0.0;
    for (std::size_t pi = 0; pi < surviving.size(); ++pi) {
      const Detection& pred = surviving[pi];
      if (taken[pi] || pred.object_class != truth.object_class ||
          pred.frame_index != truth.frame_index)
        continue;
      const double overlap = iou(truth.box, pred.box);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<std::ptrdiff_t>(pi);
      }
    }

    if (best < 0) {
      ++stats.fn;
      continue;
    }
    taken[static_cast<std::size_t>(best)] = true;
    const Box& pbox = surviving[static_cast<std::size_t>(best)].box;
    const bool iou_ok = best_iou >= cfg.iou_min && best_iou <= cfg.iou_max;
    const bool size_ok = std::min(pbox.w, pbox.h) >= cfg.min_box_size;
    if (iou_ok && size_ok) {
      ++stats.tp;
      stats.iou_sum += best_iou;
    } else {
      ++stats.badbox;
      ++stats.fn;
    }
  }

  for (std::size_t pi = 0; pi < surviving.size(); ++pi)
    if (!taken[pi]) ++stats_of(surviving[pi].object_class).fp;
  return report;
}

json to_json(const MatchReport& report) {
  json classes = json::array();
  for (const auto& [cls, s] : report.per_class) {
    classes.push_back({{"class", cls.str()},
                       {"detected", s.detected_count},
                       {"surviving", s.surviving_count},
                       {"total", s.gt_count},
                       {"tp", s.tp},
                       {"fp", s.fp},
                       {"fn", s.fn},
                       {"badbox", s.badbox},
                       {"mean_iou", s.mean_iou()},
                       {"precision", s.precision()},
                       {"recall", s.recall()},
                       {"f1", s.f1()}});
  }
  const EvalConfig& c = report.config;
  return json{{"config",
               {{"confidence_threshold", c.confidence_threshold},
                {"nms_overlap", c.nms_overlap},
                {"iou_min", c.iou_min},
                {"iou_max", c.iou_max},
                {"min_box_size", c.min_box_size}}},
              {"classes", classes}};
}

void write_csv(std::ostream& out, const MatchReport& report) {
  const EvalConfig& c = report.config;
  out << "# confidence=" << c.confidence_threshold << " nms_overlap=" << c.nms_overlap
      << " iou_min=" << c.iou_min << " iou_max=" << c.iou_max
      << " min_box_size=" << c.min_box_size << '\n';
  out << "class,detected,surviving,total,tp,fp,fn,badbox,mean_iou,precision,recall,f1\n";
  for (const auto& [cls, s] : report.per_class) {
    out << cls.str() << ',' << s.detected_count << ',' << s.surviving_count << ','
        << s.gt_count << ',' << s.tp << ',' << s.fp << ',' << s.fn << ',' << s.badbox << ','
        << s.mean_iou() << ',' << s.precision() << ',' << s.recall() << ',' << s.f1() << '\n';
  }
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Prf prf;
  prf.precision = ratio(tp, tp + fp);
  prf.recall = ratio(tp, tp + fn);
  prf.f1 = f1_score(prf.precision, prf.recall);
  prf.accuracy = ratio(tp + tn, tp + fp + fn + tn);
  return prf;
}

ConfusionMatrix confusion(std::span<const ClassLabel> truths,
                          std::span<const ClassLabel> predictions,
                          const LabelRegistry& registry) {
  if (truths.size() != predictions.size())
    throw Error(ErrorKind::ShapeMismatch, "truths and predictions differ in length");
  const auto n = static_cast<Eigen::Index>(registry.size());
  ConfusionMatrix m;
  m.labels = registry.ids();
  m.counts = CountMatrix::Zero(n, n);
  for (std::size_t i = 0; i < truths.size(); ++i)
    ++m.counts(static_cast<Eigen::Index>(registry.index_of(truths[i])),
               static_cast<Eigen::Index>(registry.index_of(predictions[i])));

  m.rates = Eigen::MatrixXd::Zero(n, n);
  m.empty_rows.assign(registry.size(), false);
  for (Eigen::Index r = 0; r < n; ++r) {
    const long long row_total = m.counts.row(r).sum();
    if (row_total == 0) {
      m.empty_rows[static_cast<std::size_t>(r)] = true;
      continue;
    }
    m.rates.row(r) = m.counts.row(r).cast<double>() / static_cast<double>(row_total);
  }
  return m;
}

ClassificationReport evaluate_alerts(std::span<const Alert> alerts,
                                     const std::map<std::size_t, ClassLabel>& truth,
                                     EvalMode mode, const LabelRegistry& labels,
                                     ClassMode class_mode) {
  const bool binary = class_mode == ClassMode::Binary;
  const LabelRegistry registry = binary ? binary_label_registry() : labels;
  auto project = [&](const ClassLabel& l) { return binary ? binary_collapse(l, labels) : l; };

  if (mode == EvalMode::PerVideo) {
    std::map<std::size_t, std::size_t> per_video;
    for (const auto& a : alerts) ++per_video[a.video_id];
    for (const auto& [video, count] : per_video)
      if (count != 1)
        throw Error(ErrorKind::InvalidParam, "video " + std::to_string(video) + " has " +
                                                 std::to_string(count) +
                                                 " alerts, per-video evaluation needs one");
  }

  std::vector<ClassLabel> truths;
  std::vector<ClassLabel> predicted;
  truths.reserve(alerts.size());
  predicted.reserve(alerts.size());
  for (const auto& a : alerts) {
    const std::size_t key = mode == EvalMode::PerVideo ? a.video_id : a.window_id;
    auto it = truth.find(key);
    if (it == truth.end())
      throw Error(ErrorKind::LabelGap, std::string("no ground truth for ") +
                                           (mode == EvalMode::PerVideo ? "video " : "window ") +
                                           std::to_string(key));
    truths.push_back(project(it->second));
    predicted.push_back(project(a.final_class));
  }

  ClassificationReport report;
  report.mode = mode;
  report.matrix = confusion(truths, predicted, registry);
  report.elements = alerts.size();
  const CountMatrix& c = report.matrix.counts;
  const long long total = c.sum();
  report.accuracy = total == 0 ? 0.0 : static_cast<double>(c.trace()) / static_cast<double>(total);
  for (Eigen::Index k = 0; k < c.rows(); ++k) {
    const long long tp = c(k, k);
    const long long fp = c.col(k).sum() - tp;
    const long long fn = c.row(k).sum() - tp;
    const long long tn = total - tp - fp - fn;
    report.per_class.emplace_back(
        registry.ids()[static_cast<std::size_t>(k)],
        prf_from_counts(static_cast<std::size_t>(tp), static_cast<std::size_t>(fp),
                        static_cast<std::size_t>(fn), static_cast<std::size_t>(tn)));
  }
  return report;
}

json to_json(const ConfusionMatrix& matrix) {
  json labels = json::array();
  for (const auto& l : matrix.labels) labels.push_back(l.str());
  json counts = json::array();
  json rates = json::array();
  for (Eigen::Index r = 0; r < matrix.counts.rows(); ++r) {
    json crow = json::array();
    json rrow = json::array();
    for (Eigen::Index c = 0; c < matrix.counts.cols(); ++c) {
      crow.push_back(matrix.counts(r, c));
      rrow.push_back(matrix.rates(r, c));
    }
    counts.push_back(crow);
    rates.push_back(rrow);
  }
  return json{{"labels", labels},
              {"counts", counts},
              {"rates", rates},
              {"empty_rows", matrix.empty_rows}};
}

json to_json(const ClassificationReport& report) {
  json classes = json::array();
  for (const auto& [label, prf] : report.per_class)
    classes.push_back({{"class", label.str()},
                       {"accuracy", prf.accuracy},
                       {"precision", prf.precision},
                       {"recall", prf.recall},
                       {"f1", prf.f1}});
  return json{{"mode", report.mode == EvalMode::PerVideo ? "per_video" : "per_sequence"},
              {"accuracy", report.accuracy},
              {"elements", report.elements},
              {"classes", classes},
              {"confusion", to_json(report.matrix)}};
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

json to_json(const TimingReport& report) {
  return json{{"per_window_ms", report.per_window_ms},
              {"average_detection_time_ms", report.average_detection_time_ms},
              {"total_processing_ms", report.total_processing_ms},
              {"video_duration_s", report.video_duration_s},
              {"fps", report.fps}};
}

TimingReport timing_from_json(const json& j) {
  TimingReport r;
  r.per_window_ms = j.at("per_window_ms").get<std::vector<double>>();
  r.average_detection_time_ms = j.at("average_detection_time_ms").get<double>();
  r.total_processing_ms = j.at("total_processing_ms").get<double>();
  r.video_duration_s = j.at("video_duration_s").get<double>();
  r.fps = j.at("fps").get<double>();
  return r;
}

void write_timing_table(std::ostream& out, std::span<const TimingReport> reports) {
  out << kTimingColumns[0] << " | " << kTimingColumns[1] << " | " << kTimingColumns[2]
      << " | " << kTimingColumns[3] << '\n';
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(3);
  for (const auto& r : reports) {
    out << r.video_duration_s << "s | " << r.fps << " | " << r.average_detection_time_ms
        << "ms | " << r.total_processing_ms << "ms\n";
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace vigil
