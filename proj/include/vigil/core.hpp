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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace vigil {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  UnknownClass,
  InvalidBox,
  VideoTooShort,
  ShapeMismatch,
  InvalidParam,
  ParseError,
  LabelGap,
  InvalidScenario,
  ConfigError,
  BackendError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure in a line-oriented input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Class taxonomy
// ---------------------------------------------------------------------------

/// String-keyed identifier, distinct per tag so labels and objects never mix.
template <class Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const Id&, const Id&) = default;
  friend auto operator<=>(const Id&, const Id&) = default;

 private:
  std::string value_;
};

struct ClassLabelTag {};
struct ObjectClassTag {};

/// Anomaly class of a sequence verdict.
using ClassLabel = Id<ClassLabelTag>;
/// Class of an object found by the spatial detector.
using ObjectClass = Id<ObjectClassTag>;

namespace labels {
inline const ClassLabel fight{"fight"};
inline const ClassLabel gunshot{"gunshot"};
inline const ClassLabel fire{"fire"};
inline const ClassLabel normal{"normal"};
inline const ClassLabel abnormal{"abnormal"};
}  // namespace labels

namespace objects {
inline const ObjectClass firearm{"firearm"};
inline const ObjectClass flame{"flame"};
inline const ObjectClass person{"person"};
}  // namespace objects

/// Ordered set of identifiers. Insertion order is the tie-break order used
/// by argmax and by the NMS output sort.
template <class Label>
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::vector<Label> ids) {
    for (auto& id : ids) add(std::move(id));
  }

  void add(Label id) {
    if (contains(id)) return;
    ids_.push_back(std::move(id));
  }

  bool contains(const Label& id) const {
    for (const auto& x : ids_)
      if (x == id) return true;
    return false;
  }

  std::size_t index_of(const Label& id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (ids_[i] == id) return i;
    throw Error(ErrorKind::UnknownClass, "unknown class '" + id.str() + "'");
  }

  /// Case-insensitive lookup by string id.
  Label parse(std::string_view text) const {
    std::string lowered(text);
    for (auto& ch : lowered)
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    Label id{lowered};
    index_of(id);
    return id;
  }

  const std::vector<Label>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }

  friend bool operator==(const Registry&, const Registry&) = default;

 private:
  std::vector<Label> ids_;
};

using LabelRegistry = Registry<ClassLabel>;
using ObjectRegistry = Registry<ObjectClass>;

/// fight, gunshot, fire, normal (normal last).
LabelRegistry default_label_registry();
/// abnormal, normal.
LabelRegistry binary_label_registry();
/// firearm, flame, person.
ObjectRegistry default_object_registry();

/// Builds a label registry from ids; `normal` is appended when absent.
LabelRegistry make_label_registry(const std::vector<std::string>& ids);

/// Normal stays Normal, every other known label becomes Abnormal.
/// Accepts any label of `registry` plus `abnormal` itself (idempotence).
ClassLabel binary_collapse(const ClassLabel& label, const LabelRegistry& registry);

// ---------------------------------------------------------------------------
// Boxes, detections, frames
// ---------------------------------------------------------------------------

/// Axis-aligned box in pixel units: (x, y) is the top-left corner.
template <typename Scalar>
struct BasicBox {
  Scalar x{};
  Scalar y{};
  Scalar w{};
  Scalar h{};

  friend bool operator==(const BasicBox&, const BasicBox&) = default;
};

using Box = BasicBox<double>;

struct Detection {
  Box box;
  ObjectClass object_class;
  double confidence = 0.0;
  std::size_t frame_index = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Row-major 8-bit buffer, `height` rows of `width * channels` interleaved
/// samples.
using PixelArray =
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Frame {
  std::size_t index = 0;
  int width = 0;
  int height = 0;
  int channels = 1;
  PixelArray pixels;
  std::optional<double> timestamp_ms;

  Frame() = default;
  Frame(std::size_t index, int width, int height, int channels,
        std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels(y, static_cast<Eigen::Index>(x) * channels + c);
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels(y, static_cast<Eigen::Index>(x) * channels + c);
  }

  std::span<const std::uint8_t> data() const {
    return {pixels.data(), static_cast<std::size_t>(pixels.size())};
  }

  bool same_shape(const Frame& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }

  /// Throws ShapeMismatch if the buffer does not match the dimensions.
  void validate() const;
};

/// Same dimensions and identical samples; ignores index and timestamp.
bool same_pixels(const Frame& a, const Frame& b);

// ---------------------------------------------------------------------------
// Windows, verdicts, alerts
// ---------------------------------------------------------------------------

enum class WindowGenerator { Sliding, SlidingOverlap, DynamicStep, SlidingDynamic };

struct SequenceWindow {
  std::vector<std::size_t> frame_indices;
  WindowGenerator generator = WindowGenerator::Sliding;
  std::size_t window_id = 0;

  friend bool operator==(const SequenceWindow&, const SequenceWindow&) = default;
};

struct Verdict {
  std::size_t window_id = 0;
  /// One entry per registry label, in registry order.
  std::vector<std::pair<ClassLabel, double>> distribution;
  ClassLabel predicted;

  double probability(const ClassLabel& label) const;
};

/// Validates that `probs` covers only registry labels and sums to 1 within
/// 1e-6, then fills the distribution in registry order and takes the argmax
/// (first maximum in registry order wins).
Verdict make_verdict(std::size_t window_id, const LabelRegistry& registry,
                     const std::map<ClassLabel, double>& probs);

/// Verdict with probability 1 on `label`.
Verdict certain_verdict(std::size_t window_id, const LabelRegistry& registry,
                        const ClassLabel& label);

enum class RuleKind { None, KeyObject, FpVeto };

struct Alert {
  std::size_t window_id = 0;
  std::size_t video_id = 0;
  ClassLabel final_class;
  ClassLabel original_class;
  RuleKind rule = RuleKind::None;
  /// Anomaly the fired rule is about (fire for a flame override, ...).
  ClassLabel rule_target;
  std::vector<Detection> supporting_detections;
};

/// "None", "KeyObjectFire", "FpVetoGunshot", ...
std::string rule_name(const Alert& alert);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class IouGate { PlainIoU, DIoU };
enum class FusionMode { Serial, Parallel };
enum class RuleVariant { ReduceFalseNegatives, ReduceFalsePositives };
enum class ClassMode { MultiClass, Binary };

struct FusionConfig {
  double confidence_threshold = 0.55;
  IouGate iou_gate = IouGate::PlainIoU;
  FusionMode mode = FusionMode::Parallel;
  RuleVariant rule_variant = RuleVariant::ReduceFalseNegatives;
  ClassMode class_mode = ClassMode::MultiClass;
  std::size_t sequence_length = 20;
  std::size_t frame_skip = 1;
  int image_size = 112;
  /// Overlap used when pooled window detections are NMS-filtered.
  double nms_overlap = 0.7;
  /// Count edge contact (zero-area intersection) as person/firearm contact.
  bool touch_counts = false;
  /// Run detector and classifier of one window on separate threads.
  bool concurrent_backends = true;

  void validate() const;
};

struct EvalConfig {
  double confidence_threshold = 0.55;
  double nms_overlap = 0.7;
  double iou_min = 0.0;
  double iou_max = 1.0;
  double min_box_size = 0.0;

  void validate() const;
};

/// Percent-or-ratio input: values above 1 are read as percentages (55 -> 0.55).
double normalize_ratio(double value);

}  // namespace vigil
