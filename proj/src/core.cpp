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

#include "vigil/core.hpp"

#include <cmath>

namespace vigil {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::VideoTooShort: return "VideoTooShort";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::LabelGap: return "LabelGap";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

LabelRegistry default_label_registry() {
  return LabelRegistry({labels::fight, labels::gunshot, labels::fire, labels::normal});
}

LabelRegistry binary_label_registry() {
  return LabelRegistry({labels::abnormal, labels::normal});
}

ObjectRegistry default_object_registry() {
  return ObjectRegistry({objects::firearm, objects::flame, objects::person});
}

LabelRegistry make_label_registry(const std::vector<std::string>& ids) {
  LabelRegistry registry;
  for (const auto& id : ids) {
    if (id.empty()) throw Error(ErrorKind::ConfigError, "empty class id");
    if (ClassLabel{id} != labels::normal) registry.add(ClassLabel{id});
  }
  registry.add(labels::normal);
  return registry;
}

ClassLabel binary_collapse(const ClassLabel& label, const LabelRegistry& registry) {
  if (label == labels::normal) return labels::normal;
  if (label == labels::abnormal) return labels::abnormal;
  registry.index_of(label);
  return labels::abnormal;
}

Frame::Frame(std::size_t index, int width, int height, int channels, std::uint8_t fill)
    : index(index), width(width), height(height), channels(channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
    throw Error(ErrorKind::InvalidParam, "invalid frame dimensions");
  pixels = PixelArray::Constant(height, static_cast<Eigen::Index>(width) * channels, fill);
}

void Frame::validate() const {
  if (pixels.rows() != height || pixels.cols() != static_cast<Eigen::Index>(width) * channels)
    throw Error(ErrorKind::ShapeMismatch, "pixel buffer does not match frame dimensions");
}

bool same_pixels(const Frame& a, const Frame& b) {
  return a.same_shape(b) && a.pixels.rows() == b.pixels.rows() &&
         a.pixels.cols() == b.pixels.cols() && (a.pixels == b.pixels).all();
}

double Verdict::probability(const ClassLabel& label) const {
  for (const auto& [id, p] : distribution)
    if (id == label) return p;
  return 0.0;
}

Verdict make_verdict(std::size_t window_id, const LabelRegistry& registry,
                     const std::map<ClassLabel, double>& probs) {
  double total = 0.0;
  for (const auto& [label, p] : probs) {
    registry.index_of(label);
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw Error(ErrorKind::InvalidParam,
                  "probability for '" + label.str() + "' outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorKind::InvalidParam,
                "distribution sums to " + std::to_string(total) + ", expected 1");

  Verdict verdict;
  verdict.window_id = window_id;
  double best = -1.0;
  for (const auto& label : registry.ids()) {
    auto it = probs.find(label);
    double p = it == probs.end() ? 0.0 : it->second;
    verdict.distribution.emplace_back(label, p);
    if (p > best) {
      best = p;
      verdict.predicted = label;
    }
  }
  return verdict;
}

Verdict certain_verdict(std::size_t window_id, const LabelRegistry& registry,
                        const ClassLabel& label) {
  return make_verdict(window_id, registry, {{label, 1.0}});
}

std::string rule_name(const Alert& alert) {
  auto capitalized = [](std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  };
  switch (alert.rule) {
    case RuleKind::None: return "None";
    case RuleKind::KeyObject: return "KeyObject" + capitalized(alert.rule_target.str());
    case RuleKind::FpVeto: return "FpVeto" + capitalized(alert.rule_target.str());
  }
  return "None";
}

void FusionConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
    throw Error(ErrorKind::ConfigError, "confidence_threshold must lie in [0,1]");
  if (!(nms_overlap >= 0.0 && nms_overlap <= 1.0))
    throw Error(ErrorKind::ConfigError, "nms_overlap must lie in [0,1]");
  if (sequence_length < 2) throw Error(ErrorKind::ConfigError, "sequence_length must be >= 2");
  if (frame_skip < 1) throw Error(ErrorKind::ConfigError, "frame_skip must be >= 1");
  if (image_size < 8) throw Error(ErrorKind::ConfigError, "image_size must be >= 8");
}

void EvalConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
    throw Error(ErrorKind::ConfigError, "confidence_threshold must lie in [0,1]");
  if (!(nms_overlap >= 0.0 && nms_overlap <= 1.0))
    throw Error(ErrorKind::ConfigError, "nms_overlap must lie in [0,1]");
  if (!(iou_min >= 0.0 && iou_min <= iou_max && iou_max <= 1.0))
    throw Error(ErrorKind::ConfigError, "require 0 <= iou_min <= iou_max <= 1");
  if (!(min_box_size >= 0.0)) throw Error(ErrorKind::ConfigError, "min_box_size must be >= 0");
}

double normalize_ratio(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw Error(ErrorKind::ConfigError, "ratio must be a non-negative number");
  if (value > 1.0) value /= 100.0;
  if (value > 1.0) throw Error(ErrorKind::ConfigError, "percentage above 100");
  return value;
}

}  // namespace vigil
