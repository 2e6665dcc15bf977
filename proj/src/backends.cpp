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

#include "vigil/backends.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include "vigil/jsonl.hpp"

namespace vigil {

std::vector<Detection> checked_detect(Detector& detector, const Frame& frame) {
  std::vector<Detection> dets = detector.detect(frame);
  for (const auto& d : dets) {
    if (d.frame_index != frame.index)
      throw Error(ErrorKind::BackendError,
                  "detector returned frame " + std::to_string(d.frame_index) +
                      " for query frame " + std::to_string(frame.index));
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw Error(ErrorKind::BackendError, "detector confidence outside [0,1]");
  }
  return dets;
}

Verdict checked_classify(Classifier& classifier, const SequenceWindow& window,
                         std::span<const Frame> frames) {
  Verdict v = classifier.classify(window, frames);
  if (v.window_id != window.window_id)
    throw Error(ErrorKind::BackendError, "classifier answered for another window");
  double total = 0.0;
  for (const auto& [label, p] : v.distribution) total += p;
  if (std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorKind::BackendError, "classifier distribution does not sum to 1");
  return v;
}

std::size_t ReplayScript::detection_count() const {
  std::size_t n = 0;
  for (const auto& [frame, dets] : detections) n += dets.size();
  return n;
}

ReplayScript parse_replay(std::istream& in, const LabelRegistry& labels,
                          const ObjectRegistry& objects) {
  ReplayScript script;
  for (const auto& line : read_jsonl(in)) {
    try {
      if (line.value.contains("window")) {
        Verdict v = verdict_from_json(line.value, labels);
        const std::size_t id = v.window_id;
        if (!script.verdicts.emplace(id, std::move(v)).second)
          throw Error(ErrorKind::ParseError, "window " + std::to_string(id) + " scripted twice");
      } else {
        Detection d = detection_from_json(line.value, objects);
        script.detections[d.frame_index].push_back(std::move(d));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw ParseError(line.line, e.what());
      throw Error(e.kind(), "line " + std::to_string(line.line) + ": " + e.what());
    }
  }
  return script;
}

ReplayScript load_replay(const std::filesystem::path& path, const LabelRegistry& labels,
                         const ObjectRegistry& objects) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse_replay(in, labels, objects);
}

ReplayScript replay_from_detections(std::span<const Detection> dets) {
  ReplayScript script;
  for (const auto& d : dets) script.detections[d.frame_index].push_back(d);
  return script;
}

void write_replay(std::ostream& out, const ReplayScript& script) {
  for (const auto& [frame, dets] : script.detections) write_detections(out, dets);
  for (const auto& [window, verdict] : script.verdicts)
    out << verdict_to_json(verdict).dump() << '\n';
}

std::vector<Detection> replay_detect(const ReplayScript& script, const Frame& frame) {
  auto it = script.detections.find(frame.index);
  if (it == script.detections.end()) return {};
  return it->second;
}

Verdict replay_classify(const ReplayScript& script, const SequenceWindow& window,
                        const LabelRegistry& labels, const ClassLabel& fallback) {
  auto it = script.verdicts.find(window.window_id);
  if (it != script.verdicts.end()) return it->second;
  return certain_verdict(window.window_id, labels, fallback);
}

ReplayClassifier::ReplayClassifier(std::shared_ptr<const ReplayScript> script,
                                   LabelRegistry labels, ClassLabel fallback)
    : script_(std::move(script)), labels_(std::move(labels)), fallback_(std::move(fallback)) {
  labels_.index_of(fallback_);
}

std::vector<Detection> DelayedDetector::detect(const Frame& frame) {
  std::this_thread::sleep_for(delay_);
  return inner_.detect(frame);
}

Verdict DelayedClassifier::classify(const SequenceWindow& window, std::span<const Frame> frames) {
  std::this_thread::sleep_for(delay_);
  return inner_.classify(window, frames);
}

}  // namespace vigil
