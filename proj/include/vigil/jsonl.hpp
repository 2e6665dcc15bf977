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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vigil/core.hpp"

namespace vigil {

/// Wire version carried by every record as "v".
inline constexpr int kRecordVersion = 1;

/// {"v":1,"frame":int,"class":str,"conf":float,"box":[x,y,w,h]}
nlohmann::json detection_to_json(const Detection& det);

/// Parses a detection record. With `require_confidence` false a missing
/// "conf" reads as 1 (ground-truth files). Throws Error(ParseError) on a
/// malformed record and Error(UnknownClass) on an unregistered class.
Detection detection_from_json(const nlohmann::json& record, const ObjectRegistry& objects,
                              bool require_confidence = true);

/// {"v":1,"window":int,"dist":{"fight":p,...}}
nlohmann::json verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const nlohmann::json& record, const LabelRegistry& labels);

/// One parsed JSONL line; `line` is 1-based. Blank lines are skipped.
struct JsonLine {
  std::size_t line = 0;
  nlohmann::json value;
};

/// Splits a JSONL stream; a line that is not a JSON object raises
/// ParseError with its line number.
std::vector<JsonLine> read_jsonl(std::istream& in);

/// Reads a detection-only JSONL stream. Errors carry the line number.
std::vector<Detection> read_detections(std::istream& in, const ObjectRegistry& objects,
                                       bool require_confidence = true);
std::vector<Detection> read_detections_file(const std::string& path,
                                            const ObjectRegistry& objects,
                                            bool require_confidence = true);
void write_detections(std::ostream& out, std::span<const Detection> dets);

}  // namespace vigil
