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

#include "vigil/fusion.hpp"

#include <algorithm>
#include <future>

#include "vigil/geometry.hpp"

namespace vigil {

KeyObjectDictionary KeyObjectDictionary::defaults() {
  return KeyObjectDictionary({{objects::flame, labels::fire, false},
                              {objects::firearm, labels::gunshot, true}},
                             default_label_registry(), default_object_registry());
}

KeyObjectDictionary::KeyObjectDictionary(std::vector<KeyObjectRule> rules,
                                         const LabelRegistry& labels,
                                         const ObjectRegistry& objects, ObjectClass person)
    : rules_(std::move(rules)), person_(std::move(person)) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (!objects.contains(person_)) fail("person class '" + person_.str() + "' is not registered");
  for (const auto& rule : rules_) {
    if (!objects.contains(rule.object)) fail("key object '" + rule.object.str() + "' is not registered");
    if (!labels.contains(rule.anomaly)) fail("anomaly '" + rule.anomaly.str() + "' is not registered");
    if (rule.anomaly == labels::normal) fail("key object '" + rule.object.str() + "' maps to normal");
    if (rule.object == person_) fail("the person class cannot map to an anomaly");
  }
}

const KeyObjectRule* KeyObjectDictionary::rule_for(const ClassLabel& label) const {
  for (const auto& rule : rules_)
    if (rule.anomaly == label) return &rule;
  return nullptr;
}

namespace {

std::vector<Detection> qualifying(std::span<const Detection> dets, const ObjectClass& cls,
                                  double threshold) {
  std::vector<Detection> out;
  for (const auto& d : dets)
    if (d.object_class == cls && d.confidence >= threshold) out.push_back(d);
  return out;
}

bool in_contact(const Box& object, const Box& person, const FusionConfig& cfg) {
  const double gate = cfg.iou_gate == IouGate::DIoU ? diou(object, person) : iou(object, person);
  return gate > 0.0 || (cfg.touch_counts && touches(object, person));
}

// Detections that make `rule` fire; empty when it does not.
std::vector<Detection> key_object_support(const KeyObjectRule& rule,
                                          std::span<const Detection> dets,
                                          const FusionConfig& cfg,
                                          const KeyObjectDictionary& dict) {
  std::vector<Detection> hits = qualifying(dets, rule.object, cfg.confidence_threshold);
  if (!rule.requires_person_contact || hits.empty()) return hits;

  const std::vector<Detection> persons = qualifying(dets, dict.person(), cfg.confidence_threshold);
  std::vector<Detection> support;
  auto add = [&](const Detection& d) {
    if (std::find(support.begin(), support.end(), d) == support.end()) support.push_back(d);
  };
  for (const auto& obj : hits)
    for (const auto& person : persons)
      if (obj.frame_index == person.frame_index && in_contact(obj.box, person.box, cfg)) {
        add(obj);
        add(person);
      }
  return support;
}

}  // namespace

Alert correct_verdict(const Verdict& verdict, std::span<const Detection> dets,
                      const FusionConfig& cfg, const KeyObjectDictionary& dict) {
  Alert alert;
  alert.window_id = verdict.window_id;
  alert.original_class = verdict.predicted;
  alert.final_class = verdict.predicted;

  if (verdict.predicted != labels::normal) {
    if (cfg.rule_variant == RuleVariant::ReduceFalsePositives) {
      if (const KeyObjectRule* rule = dict.rule_for(verdict.predicted)) {
        auto seen = qualifying(dets, rule->object, cfg.confidence_threshold);
        if (seen.empty()) {
          alert.final_class = labels::normal;
          alert.rule = RuleKind::FpVeto;
          alert.rule_target = verdict.predicted;
        } else {
          alert.supporting_detections = std::move(seen);
        }
      }
    }
    return alert;
  }

  for (const auto& rule : dict.rules()) {
    auto support = key_object_support(rule, dets, cfg, dict);
    if (!support.empty()) {
      alert.final_class = rule.anomaly;
      alert.rule = RuleKind::KeyObject;
      alert.rule_target = rule.anomaly;
      alert.supporting_detections = std::move(support);
      return alert;
    }
  }
  return alert;
}

Pipeline::Pipeline(FusionConfig cfg, Detector& detector, Classifier& classifier,
                   KeyObjectDictionary dict, SerialPreprocess preprocess, LabelRegistry labels,
                   ObjectRegistry objects)
    : cfg_(cfg),
      detector_(detector),
      classifier_(classifier),
      dict_(std::move(dict)),
      preprocess_(preprocess),
      labels_(std::move(labels)),
      objects_(std::move(objects)) {
  cfg_.validate();
}

namespace {

const Frame& frame_at(std::span<const Frame> frames, std::size_t index) {
  if (index >= frames.size())
    throw Error(ErrorKind::InvalidParam, "window references frame " + std::to_string(index) +
                                             " beyond the " + std::to_string(frames.size()) +
                                             " available");
  const Frame& f = frames[index];
  if (f.index != index)
    throw Error(ErrorKind::InvalidParam, "frame at position " + std::to_string(index) +
                                             " carries index " + std::to_string(f.index));
  return f;
}

template <class Fn>
auto with_window_context(const SequenceWindow& window, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "window " + std::to_string(window.window_id) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::BackendError,
                "window " + std::to_string(window.window_id) + ": " + e.what());
  }
}

}  // namespace

Alert Pipeline::process(const SequenceWindow& window, std::span<const Frame> frames) const {
  Alert alert = with_window_context(window, [&] {
    return cfg_.mode == FusionMode::Parallel ? parallel(window, frames) : serial(window, frames);
  });
  if (cfg_.class_mode == ClassMode::Binary) {
    alert.final_class = binary_collapse(alert.final_class, labels_);
    alert.original_class = binary_collapse(alert.original_class, labels_);
  }
  return alert;
}

Alert Pipeline::parallel(const SequenceWindow& window, std::span<const Frame> frames) const {
  std::vector<const Frame*> members;
  members.reserve(window.frame_indices.size());
  for (std::size_t idx : window.frame_indices) members.push_back(&frame_at(frames, idx));

  auto classify = [&] {
    std::vector<Frame> inputs;
    inputs.reserve(members.size());
    for (const Frame* f : members) inputs.push_back(resize(*f, cfg_.image_size));
    return checked_classify(classifier_, window, inputs);
  };
  auto detect = [&] {
    std::vector<Detection> pooled;
    for (std::size_t pos = 0; pos < members.size(); pos += cfg_.frame_skip) {
      auto dets = checked_detect(detector_, *members[pos]);
      pooled.insert(pooled.end(), dets.begin(), dets.end());
    }
    return nms(pooled, cfg_.confidence_threshold, cfg_.nms_overlap, objects_);
  };

  Verdict verdict;
  std::vector<Detection> dets;
  if (cfg_.concurrent_backends) {
    auto pending = std::async(std::launch::async, classify);
    try {
      dets = detect();
    } catch (...) {
      pending.wait();
      throw;
    }
    verdict = pending.get();
  } else {
    verdict = classify();
    dets = detect();
  }

  Alert alert = correct_verdict(verdict, dets, cfg_, dict_);
  alert.window_id = window.window_id;
  return alert;
}

Alert Pipeline::serial(const SequenceWindow& window, std::span<const Frame> frames) const {
  std::vector<Frame> inputs;
  inputs.reserve(window.frame_indices.size());
  for (std::size_t idx : window.frame_indices) {
    const Frame& f = frame_at(frames, idx);
    const auto dets =
        nms(checked_detect(detector_, f), cfg_.confidence_threshold, cfg_.nms_overlap, objects_);
    Frame prepared;
    switch (preprocess_) {
      case SerialPreprocess::DrawBoxes: prepared = draw_boxes(f, dets, objects_); break;
      case SerialPreprocess::MaskBlack: prepared = apply_box_mask(f, dets, MaskBackground::Black); break;
      case SerialPreprocess::MaskOriginal: prepared = apply_box_mask(f, dets, MaskBackground::Original); break;
    }
    inputs.push_back(resize(prepared, cfg_.image_size));
  }
  const Verdict verdict = checked_classify(classifier_, window, inputs);

  Alert alert;
  alert.window_id = window.window_id;
  alert.original_class = verdict.predicted;
  alert.final_class = verdict.predicted;
  return alert;
}

std::vector<Alert> run_parallel(std::span<const Frame> frames,
                                std::span<const SequenceWindow> windows, Detector& detector,
                                Classifier& classifier, const FusionConfig& cfg,
                                const KeyObjectDictionary& dict) {
  FusionConfig parallel_cfg = cfg;
  parallel_cfg.mode = FusionMode::Parallel;
  const Pipeline pipeline(parallel_cfg, detector, classifier, dict);
  std::vector<Alert> alerts;
  alerts.reserve(windows.size());
  for (const auto& w : windows) alerts.push_back(pipeline.process(w, frames));
  return alerts;
}

std::vector<Alert> run_serial(std::span<const Frame> frames,
                              std::span<const SequenceWindow> windows, Detector& detector,
                              Classifier& classifier, const FusionConfig& cfg,
                              SerialPreprocess preprocess) {
  FusionConfig serial_cfg = cfg;
  serial_cfg.mode = FusionMode::Serial;
  const Pipeline pipeline(serial_cfg, detector, classifier, KeyObjectDictionary::defaults(),
                          preprocess);
  std::vector<Alert> alerts;
  alerts.reserve(windows.size());
  for (const auto& w : windows) alerts.push_back(pipeline.process(w, frames));
  return alerts;
}

std::vector<Alert> binary_alerts(std::vector<Alert> alerts, const FusionConfig& cfg,
                                 const LabelRegistry& labels) {
  if (cfg.class_mode != ClassMode::Binary) return alerts;
  for (auto& a : alerts) {
    a.final_class = binary_collapse(a.final_class, labels);
    a.original_class = binary_collapse(a.original_class, labels);
  }
  return alerts;
}

}  // namespace vigil
