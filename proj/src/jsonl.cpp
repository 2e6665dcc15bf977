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

#include "vigil/jsonl.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace vigil {

using nlohmann::json;

namespace {

void check_version(const json& record) {
  if (!record.contains("v") || !record["v"].is_number_integer() ||
      record["v"].get<int>() != kRecordVersion)
    throw Error(ErrorKind::ParseError, "missing or unsupported record version \"v\"");
}

std::size_t require_index(const json& record, const char* key) {
  if (!record.contains(key) || !record[key].is_number_integer() || record[key].get<long long>() < 0)
    throw Error(ErrorKind::ParseError, std::string("\"") + key + "\" must be a non-negative integer");
  return record[key].get<std::size_t>();
}

double require_number(const json& value, const std::string& what) {
  if (!value.is_number()) throw Error(ErrorKind::ParseError, what + " must be a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorKind::ParseError, what + " must be finite");
  return v;
}

// Rethrows with the line number, keeping the error kind.
[[noreturn]] void rethrow_at(std::size_t line, const Error& e) {
  if (e.kind() == ErrorKind::ParseError) throw ParseError(line, e.what());
  throw Error(e.kind(), "line " + std::to_string(line) + ": " + e.what());
}

}  // namespace

json detection_to_json(const Detection& det) {
  return json{{"v", kRecordVersion},
              {"frame", det.frame_index},
              {"class", det.object_class.str()},
              {"conf", det.confidence},
              {"box", {det.box.x, det.box.y, det.box.w, det.box.h}}};
}

Detection detection_from_json(const json& record, const ObjectRegistry& objects,
                              bool require_confidence) {
  if (!record.is_object()) throw Error(ErrorKind::ParseError, "record is not an object");
  check_version(record);
  Detection det;
  det.frame_index = require_index(record, "frame");

  if (!record.contains("class") || !record["class"].is_string())
    throw Error(ErrorKind::ParseError, "\"class\" must be a string");
  det.object_class = objects.parse(record["class"].get<std::string>());

  if (record.contains("conf")) {
    det.confidence = require_number(record["conf"], "\"conf\"");
    if (det.confidence < 0.0 || det.confidence > 1.0)
      throw Error(ErrorKind::ParseError, "\"conf\" outside [0,1]");
  } else if (require_confidence) {
    throw Error(ErrorKind::ParseError, "missing \"conf\"");
  } else {
    det.confidence = 1.0;
  }

  if (!record.contains("box") || !record["box"].is_array() || record["box"].size() != 4)
    throw Error(ErrorKind::ParseError, "\"box\" must be [x,y,w,h]");
  const json& b = record["box"];
  det.box = {require_number(b[0], "box x"), require_number(b[1], "box y"),
             require_number(b[2], "box w"), require_number(b[3], "box h")};
  if (det.box.w <= 0.0 || det.box.h <= 0.0)
    throw Error(ErrorKind::ParseError, "box width and height must be positive");
  return det;
}

json verdict_to_json(const Verdict& verdict) {
  json dist = json::object();
  for (const auto& [label, p] : verdict.distribution) dist[label.str()] = p;
  return json{{"v", kRecordVersion}, {"window", verdict.window_id}, {"dist", dist}};
}

Verdict verdict_from_json(const json& record, const LabelRegistry& labels) {
  if (!record.is_object()) throw Error(ErrorKind::ParseError, "record is not an object");
  check_version(record);
  const std::size_t window = require_index(record, "window");
  if (!record.contains("dist") || !record["dist"].is_object())
    throw Error(ErrorKind::ParseError, "\"dist\" must be an object");
  std::map<ClassLabel, double> probs;
  for (const auto& [key, value] : record["dist"].items())
    probs[labels.parse(key)] = require_number(value, "probability of " + key);
  try {
    return make_verdict(window, labels, probs);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidParam) throw Error(ErrorKind::ParseError, e.what());
    throw;
  }
}

std::vector<JsonLine> read_jsonl(std::istream& in) {
  std::vector<JsonLine> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) throw ParseError(number, "invalid JSON");
    if (!value.is_object()) throw ParseError(number, "record is not a JSON object");
    lines.push_back({number, std::move(value)});
  }
  return lines;
}

std::vector<Detection> read_detections(std::istream& in, const ObjectRegistry& objects,
                                       bool require_confidence) {
  std::vector<Detection> dets;
  for (const auto& line : read_jsonl(in)) {
    try {
      dets.push_back(detection_from_json(line.value, objects, require_confidence));
    } catch (const Error& e) {
      rethrow_at(line.line, e);
    }
  }
  return dets;
}

std::vector<Detection> read_detections_file(const std::string& path,
                                            const ObjectRegistry& objects,
                                            bool require_confidence) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read_detections(in, objects, require_confidence);
}

void write_detections(std::ostream& out, std::span<const Detection> dets) {
  for (const auto& det : dets) out << detection_to_json(det).dump() << '\n';
}

}  // namespace vigil
