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

#include "vigil/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vigil {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad("expected a number, got '" + v + "'");
  return out;
}

std::size_t to_count(const std::string& v) {
  std::size_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad("expected a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  bad("expected a boolean, got '" + v + "'");
}

ScenarioEvent parse_event(const std::string& value) {
  // <label> <start> <end> [object ...]
  const auto words = split_words(value);
  if (words.size() < 3) bad("event needs '<label> <start> <end> [objects...]'");
  ScenarioEvent e;
  e.label = default_label_registry().parse(words[0]);
  e.start = to_count(words[1]);
  e.end = to_count(words[2]);
  const auto objects = default_object_registry();
  for (std::size_t i = 3; i < words.size(); ++i)
    e.objects.push_back({objects.parse(words[i]), std::nullopt, std::nullopt});
  return e;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value,
           const std::filesystem::path& base) {
  auto path = [&] {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
  };
  auto& f = cfg.fusion;
  if (key == "mode") f.mode = parse_mode(value);
  else if (key == "rule_variant" || key == "rule") f.rule_variant = parse_rule_variant(value);
  else if (key == "class_mode") {
    const auto l = lower(value);
    if (l == "binary") f.class_mode = ClassMode::Binary;
    else if (l == "multiclass" || l == "multi") f.class_mode = ClassMode::MultiClass;
    else bad("class_mode must be multiclass or binary");
  } else if (key == "confidence_threshold") {
    f.confidence_threshold = cfg.eval.confidence_threshold = normalize_ratio(to_double(value));
  } else if (key == "iou_gate") f.iou_gate = parse_iou_gate(value);
  else if (key == "sequence_length") {
    f.sequence_length = cfg.windows.window_len = cfg.windows.target_count = to_count(value);
  } else if (key == "frame_skip") f.frame_skip = to_count(value);
  else if (key == "image_size") f.image_size = static_cast<int>(to_count(value));
  else if (key == "nms_overlap") {
    f.nms_overlap = cfg.eval.nms_overlap = normalize_ratio(to_double(value));
  } else if (key == "touch_counts") f.touch_counts = to_bool(value);
  else if (key == "concurrent_backends") f.concurrent_backends = to_bool(value);
  else if (key == "iou_min") cfg.eval.iou_min = normalize_ratio(to_double(value));
  else if (key == "iou_max") cfg.eval.iou_max = normalize_ratio(to_double(value));
  else if (key == "min_box_size") cfg.eval.min_box_size = to_double(value);
  else if (key == "generator") cfg.windows.mode = parse_generator(value);
  else if (key == "overlap") cfg.windows.overlap = to_count(value);
  else if (key == "stride") cfg.windows.stride = to_count(value);
  else if (key == "dynamic_factor") cfg.windows.dynamic_factor = to_count(value);
  else if (key == "fps") cfg.windows.fps = to_double(value);
  else if (key == "seed") cfg.scenario.seed = to_count(value);
  else if (key == "n_frames") cfg.scenario.n_frames = to_count(value);
  else if (key == "width") cfg.scenario.width = static_cast<int>(to_count(value));
  else if (key == "height") cfg.scenario.height = static_cast<int>(to_count(value));
  else if (key == "channels") cfg.scenario.channels = static_cast<int>(to_count(value));
  else if (key == "event") cfg.scenario.events.push_back(parse_event(value));
  else if (key == "frames") cfg.frames = path();
  else if (key == "replay") cfg.replay = path();
  else if (key == "report") cfg.report = path();
  else if (key == "fallback") cfg.fallback = default_label_registry().parse(value);
  else if (key == "preprocess") cfg.preprocess = parse_preprocess(value);
  else if (key == "detector") {
    const auto l = lower(value);
    if (l == "gt") cfg.detector = DetectorSource::GroundTruth;
    else if (l == "replay") cfg.detector = DetectorSource::Replay;
    else if (l == "null") cfg.detector = DetectorSource::Null;
    else if (l == "external") cfg.detector = DetectorSource::External;
    else bad("detector must be gt, replay, null or external");
  } else if (key == "classifier") {
    const auto l = lower(value);
    if (l == "oracle") cfg.classifier = ClassifierSource::Oracle;
    else if (l == "normal") cfg.classifier = ClassifierSource::Normal;
    else if (l == "replay") cfg.classifier = ClassifierSource::Replay;
    else if (l == "external") cfg.classifier = ClassifierSource::External;
    else bad("classifier must be oracle, normal, replay or external");
  } else if (key == "detector_command") cfg.detector_command = split_words(value);
  else if (key == "classifier_command") cfg.classifier_command = split_words(value);
  else if (key == "detector_delay_ms") cfg.detector_delay_ms = to_double(value);
  else if (key == "classifier_delay_ms") cfg.classifier_delay_ms = to_double(value);
  else bad("unknown key '" + key + "'");
}

}  // namespace

FusionMode parse_mode(const std::string& text) {
  const auto l = lower(text);
  if (l == "serial") return FusionMode::Serial;
  if (l == "parallel") return FusionMode::Parallel;
  bad("mode must be serial or parallel");
}

RuleVariant parse_rule_variant(const std::string& text) {
  const auto l = lower(text);
  if (l == "fn") return RuleVariant::ReduceFalseNegatives;
  if (l == "fp") return RuleVariant::ReduceFalsePositives;
  bad("rule variant must be fn or fp");
}

WindowGenerator parse_generator(const std::string& text) {
  const auto l = lower(text);
  if (l == "sliding") return WindowGenerator::Sliding;
  if (l == "sliding_overlap") return WindowGenerator::SlidingOverlap;
  if (l == "dynamic_step") return WindowGenerator::DynamicStep;
  if (l == "sliding_dynamic") return WindowGenerator::SlidingDynamic;
  bad("generator must be sliding, sliding_overlap, dynamic_step or sliding_dynamic");
}

IouGate parse_iou_gate(const std::string& text) {
  const auto l = lower(text);
  if (l == "iou") return IouGate::PlainIoU;
  if (l == "diou") return IouGate::DIoU;
  bad("iou_gate must be iou or diou");
}

SerialPreprocess parse_preprocess(const std::string& text) {
  const auto l = lower(text);
  if (l == "draw_boxes") return SerialPreprocess::DrawBoxes;
  if (l == "mask_black") return SerialPreprocess::MaskBlack;
  if (l == "mask_original") return SerialPreprocess::MaskOriginal;
  bad("preprocess must be draw_boxes, mask_black or mask_original");
}

std::string to_string(FusionMode mode) {
  return mode == FusionMode::Serial ? "serial" : "parallel";
}

std::string to_string(RuleVariant variant) {
  return variant == RuleVariant::ReduceFalseNegatives ? "fn" : "fp";
}

std::string to_string(WindowGenerator generator) {
  switch (generator) {
    case WindowGenerator::Sliding: return "sliding";
    case WindowGenerator::SlidingOverlap: return "sliding_overlap";
    case WindowGenerator::DynamicStep: return "dynamic_step";
    case WindowGenerator::SlidingDynamic: return "sliding_dynamic";
  }
  return "?";
}

void RunConfig::validate() const {
  fusion.validate();
  eval.validate();
  windows.validate();
  if (detector == DetectorSource::Replay && !replay) bad("detector = replay needs 'replay'");
  if (classifier == ClassifierSource::Replay && !replay) bad("classifier = replay needs 'replay'");
  if (detector == DetectorSource::External && detector_command.empty())
    bad("detector = external needs 'detector_command'");
  if (classifier == ClassifierSource::External && classifier_command.empty())
    bad("classifier = external needs 'classifier_command'");
  if (detector_delay_ms < 0 || classifier_delay_ms < 0) bad("delays must be non-negative");
  if (frames && (detector == DetectorSource::GroundTruth || classifier == ClassifierSource::Oracle))
    bad("gt detector and oracle classifier need a scenario, not a frames directory");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const auto text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    try {
      if (eq == std::string::npos) bad("expected 'key = value'");
      const auto key = lower(trim(text.substr(0, eq)));
      const auto value = trim(text.substr(eq + 1));
      if (key.empty() || value.empty()) bad("expected 'key = value'");
      apply(cfg, key, value, base_dir);
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, "config line " + std::to_string(line) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace vigil
