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

#include <span>
#include <vector>

#include "vigil/backends.hpp"
#include "vigil/core.hpp"
#include "vigil/preprocess.hpp"

namespace vigil {

/// Links a detector object class to the anomaly it implies.
struct KeyObjectRule {
  ObjectClass object;
  ClassLabel anomaly;
  /// The object only counts when it is in contact with a detected person
  /// (firearms: a gun nobody holds is not a shooting).
  bool requires_person_contact = false;
};

/// Ordered key-object rules. Order is precedence when several key objects
/// qualify in the same window.
class KeyObjectDictionary {
 public:
  /// flame -> fire, then firearm -> gunshot (with person contact).
  static KeyObjectDictionary defaults();

  /// Throws ConfigError when an object or anomaly is unregistered, an
  /// anomaly is normal, or the person class is itself mapped.
  KeyObjectDictionary(std::vector<KeyObjectRule> rules, const LabelRegistry& labels,
                      const ObjectRegistry& objects, ObjectClass person = objects::person);

  const std::vector<KeyObjectRule>& rules() const noexcept { return rules_; }
  const ObjectClass& person() const noexcept { return person_; }
  /// Rule whose anomaly is `label`, or nullptr.
  const KeyObjectRule* rule_for(const ClassLabel& label) const;

 private:
  std::vector<KeyObjectRule> rules_;
  ObjectClass person_;
};

/// Corrects a sequence verdict with the window's (already NMS-filtered)
/// detections.
///
/// A non-normal prediction stands. A normal prediction becomes the anomaly
/// of the first key object, in dictionary order, that has a detection at or
/// above the confidence threshold; person-contact objects additionally need
/// a qualifying person on the same frame whose gate value (IoU or DIoU per
/// config) with the object is strictly positive. Under ReduceFalsePositives, a predicted
/// anomaly that has a key object is vetoed to normal when no detection of
/// that object reaches the threshold.
Alert correct_verdict(const Verdict& verdict, std::span<const Detection> dets,
                      const FusionConfig& cfg, const KeyObjectDictionary& dict);

enum class SerialPreprocess { DrawBoxes, MaskBlack, MaskOriginal };

/// One window through either architecture. Holds references to the
/// backends; the pipeline itself carries no mutable state.
class Pipeline {
 public:
  Pipeline(FusionConfig cfg, Detector& detector, Classifier& classifier,
           KeyObjectDictionary dict = KeyObjectDictionary::defaults(),
           SerialPreprocess preprocess = SerialPreprocess::MaskOriginal,
           LabelRegistry labels = default_label_registry(),
           ObjectRegistry objects = default_object_registry());

  /// `frames[i]` must be the frame with index i.
  Alert process(const SequenceWindow& window, std::span<const Frame> frames) const;

  const FusionConfig& config() const noexcept { return cfg_; }

 private:
  Alert parallel(const SequenceWindow& window, std::span<const Frame> frames) const;
  Alert serial(const SequenceWindow& window, std::span<const Frame> frames) const;

  FusionConfig cfg_;
  Detector& detector_;
  Classifier& classifier_;
  KeyObjectDictionary dict_;
  SerialPreprocess preprocess_;
  LabelRegistry labels_;
  ObjectRegistry objects_;
};

/// Parallel architecture: per window the classifier sees the resized raw
/// frames while the detector runs on every frame_skip-th window frame; the
/// pooled detections are NMS-filtered and fed to correct_verdict.
std::vector<Alert> run_parallel(std::span<const Frame> frames,
                                std::span<const SequenceWindow> windows, Detector& detector,
                                Classifier& classifier, const FusionConfig& cfg,
                                const KeyObjectDictionary& dict = KeyObjectDictionary::defaults());

/// Serial architecture: every window frame goes through the detector and the
/// chosen preprocessing, is resized, and the classifier's verdict is final.
std::vector<Alert> run_serial(std::span<const Frame> frames,
                              std::span<const SequenceWindow> windows, Detector& detector,
                              Classifier& classifier, const FusionConfig& cfg,
                              SerialPreprocess preprocess);

/// Collapses final and original labels to normal/abnormal when
/// cfg.class_mode is Binary; otherwise returns the alerts unchanged.
std::vector<Alert> binary_alerts(std::vector<Alert> alerts, const FusionConfig& cfg,
                                 const LabelRegistry& labels = default_label_registry());

}  // namespace vigil
