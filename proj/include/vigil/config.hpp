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

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "vigil/core.hpp"
#include "vigil/fusion.hpp"
#include "vigil/scenario.hpp"
#include "vigil/windowing.hpp"

namespace vigil {

enum class DetectorSource { GroundTruth, Replay, Null, External };
enum class ClassifierSource { Oracle, Normal, Replay, External };

/// Everything a `run` or `bench` invocation needs. Loaded from a flat
/// `key = value` file; `#` starts a comment.
///
///   mode = parallel            rule_variant = fn
///   confidence_threshold = 55  generator = sliding
///   event = fire 200 399 flame
///
/// Relative paths are resolved against the config file's directory.
struct RunConfig {
  FusionConfig fusion;
  EvalConfig eval;
  WindowSpec windows;
  ScenarioSpec scenario;

  DetectorSource detector = DetectorSource::GroundTruth;
  ClassifierSource classifier = ClassifierSource::Oracle;
  ClassLabel fallback = labels::normal;
  SerialPreprocess preprocess = SerialPreprocess::MaskOriginal;

  /// PPM directory; when unset the frames come from the scenario.
  std::optional<std::filesystem::path> frames;
  /// Replay JSONL (detection and verdict records).
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> report;
  std::vector<std::string> detector_command;
  std::vector<std::string> classifier_command;
  double detector_delay_ms = 0.0;
  double classifier_delay_ms = 0.0;

  RunConfig() { windows.mode = WindowGenerator::Sliding; }

  void validate() const;
};

/// Throws ConfigError naming the offending line.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Single-setting parsers shared with the command-line flags.
FusionMode parse_mode(const std::string& text);
RuleVariant parse_rule_variant(const std::string& text);
WindowGenerator parse_generator(const std::string& text);
IouGate parse_iou_gate(const std::string& text);
SerialPreprocess parse_preprocess(const std::string& text);

std::string to_string(FusionMode mode);
std::string to_string(RuleVariant variant);
std::string to_string(WindowGenerator generator);

}  // namespace vigil
