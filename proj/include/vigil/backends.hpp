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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vigil/core.hpp"

namespace vigil {

/// Spatial analysis: objects found on one frame.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const Frame& frame) = 0;
  /// False when concurrent detect() calls must be serialized by the caller.
  virtual bool thread_safe() const { return true; }
};

/// Temporal analysis: one verdict per sequence window.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Verdict classify(const SequenceWindow& window, std::span<const Frame> frames) = 0;
  virtual bool thread_safe() const { return true; }
};

/// detect() plus the contract checks: every detection carries the frame's
/// index and a confidence in [0,1]. Violations raise BackendError.
std::vector<Detection> checked_detect(Detector& detector, const Frame& frame);
/// classify() plus the contract checks on window id and distribution mass.
Verdict checked_classify(Classifier& classifier, const SequenceWindow& window,
                         std::span<const Frame> frames);

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayScript {
  /// Detections per frame index, in file order.
  std::map<std::size_t, std::vector<Detection>> detections;
  std::map<std::size_t, Verdict> verdicts;

  bool empty() const { return detections.empty() && verdicts.empty(); }
  std::size_t detection_count() const;
};

/// Reads a JSONL stream mixing detection and verdict records. Malformed
/// lines raise ParseError with the line number, unregistered classes raise
/// UnknownClass. A window scripted twice is a ParseError.
ReplayScript parse_replay(std::istream& in, const LabelRegistry& labels,
                          const ObjectRegistry& objects);
ReplayScript load_replay(const std::filesystem::path& path, const LabelRegistry& labels,
                         const ObjectRegistry& objects);

ReplayScript replay_from_detections(std::span<const Detection> dets);

void write_replay(std::ostream& out, const ReplayScript& script);

/// Scripted detections for frame.index; empty when the frame has none.
std::vector<Detection> replay_detect(const ReplayScript& script, const Frame& frame);
/// Scripted verdict for window.window_id, else certainty on `fallback`.
Verdict replay_classify(const ReplayScript& script, const SequenceWindow& window,
                        const LabelRegistry& labels, const ClassLabel& fallback);

class ReplayDetector final : public Detector {
 public:
  explicit ReplayDetector(std::shared_ptr<const ReplayScript> script)
      : script_(std::move(script)) {}
  std::vector<Detection> detect(const Frame& frame) override {
    return replay_detect(*script_, frame);
  }

 private:
  std::shared_ptr<const ReplayScript> script_;
};

class ReplayClassifier final : public Classifier {
 public:
  ReplayClassifier(std::shared_ptr<const ReplayScript> script, LabelRegistry labels,
                   ClassLabel fallback = labels::normal);
  Verdict classify(const SequenceWindow& window, std::span<const Frame>) override {
    return replay_classify(*script_, window, labels_, fallback_);
  }

 private:
  std::shared_ptr<const ReplayScript> script_;
  LabelRegistry labels_;
  ClassLabel fallback_;
};

// ---------------------------------------------------------------------------
// Mocks
// ---------------------------------------------------------------------------

class NullDetector final : public Detector {
 public:
  std::vector<Detection> detect(const Frame&) override { return {}; }
};

class FunctionDetector final : public Detector {
 public:
  using Fn = std::function<std::vector<Detection>(const Frame&)>;
  explicit FunctionDetector(Fn fn) : fn_(std::move(fn)) {}
  std::vector<Detection> detect(const Frame& frame) override { return fn_(frame); }

 private:
  Fn fn_;
};

class FunctionClassifier final : public Classifier {
 public:
  using Fn = std::function<Verdict(const SequenceWindow&, std::span<const Frame>)>;
  explicit FunctionClassifier(Fn fn) : fn_(std::move(fn)) {}
  Verdict classify(const SequenceWindow& window, std::span<const Frame> frames) override {
    return fn_(window, frames);
  }

 private:
  Fn fn_;
};

/// Adds a fixed sleep before every call of the wrapped backend. Used to
/// stand in for model latency in timing runs.
class DelayedDetector final : public Detector {
 public:
  DelayedDetector(Detector& inner, std::chrono::microseconds delay)
      : inner_(inner), delay_(delay) {}
  std::vector<Detection> detect(const Frame& frame) override;
  bool thread_safe() const override { return inner_.thread_safe(); }

 private:
  Detector& inner_;
  std::chrono::microseconds delay_;
};

class DelayedClassifier final : public Classifier {
 public:
  DelayedClassifier(Classifier& inner, std::chrono::microseconds delay)
      : inner_(inner), delay_(delay) {}
  Verdict classify(const SequenceWindow& window, std::span<const Frame> frames) override;
  bool thread_safe() const override { return inner_.thread_safe(); }

 private:
  Classifier& inner_;
  std::chrono::microseconds delay_;
};

// ---------------------------------------------------------------------------
// External process
// ---------------------------------------------------------------------------

/// Child process speaking newline-delimited JSON over stdin/stdout. Every
/// request and response carries "v":1; a response with an "error" member
/// raises BackendError. Calls are serialized internally.
class ExternalProcess {
 public:
  explicit ExternalProcess(std::vector<std::string> argv);
  ~ExternalProcess();
  ExternalProcess(const ExternalProcess&) = delete;
  ExternalProcess& operator=(const ExternalProcess&) = delete;

  nlohmann::json request(const nlohmann::json& message);

 private:
  std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Frame as sent on the wire: index, dimensions and base64 pixels.
nlohmann::json frame_to_json(const Frame& frame);
Frame frame_from_json(const nlohmann::json& message);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Request {"v":1,"op":"detect","frame":{...}};
/// response {"v":1,"detections":[{"class","conf","box"}]}.
class ExternalDetector final : public Detector {
 public:
  ExternalDetector(std::shared_ptr<ExternalProcess> process, ObjectRegistry objects)
      : process_(std::move(process)), objects_(std::move(objects)) {}
  std::vector<Detection> detect(const Frame& frame) override;
  bool thread_safe() const override { return false; }

 private:
  std::shared_ptr<ExternalProcess> process_;
  ObjectRegistry objects_;
};

/// Request {"v":1,"op":"classify","window":id,"frames":[...]};
/// response {"v":1,"dist":{...}}.
class ExternalClassifier final : public Classifier {
 public:
  ExternalClassifier(std::shared_ptr<ExternalProcess> process, LabelRegistry labels)
      : process_(std::move(process)), labels_(std::move(labels)) {}
  Verdict classify(const SequenceWindow& window, std::span<const Frame> frames) override;
  bool thread_safe() const override { return false; }

 private:
  std::shared_ptr<ExternalProcess> process_;
  LabelRegistry labels_;
};

}  // namespace vigil
