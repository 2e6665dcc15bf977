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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vigil/core.hpp"

namespace vigil {

/// Filled rectangle that moves while its event is active.
struct ScenarioObject {
  ObjectClass object_class;
  /// Size and position at the event's first frame; drawn from the seed when unset.
  std::optional<BasicBox<int>> start;
  /// Pixels per frame; drawn from the seed when unset. Objects bounce off
  /// the frame edges.
  std::optional<Eigen::Vector2i> velocity;
};

struct ScenarioEvent {
  ClassLabel label;
  /// Inclusive frame range.
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<ScenarioObject> objects;
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  std::size_t n_frames = 600;
  int width = 160;
  int height = 120;
  int channels = 3;
  std::vector<ScenarioEvent> events;
};

struct Scenario {
  std::vector<Frame> frames;
  /// One box per object per frame it is visible on, confidence 1.
  std::vector<Detection> gt_detections;
};

/// Renders the scenario. Identical specs give bit-identical output.
/// Throws InvalidScenario for events outside the video, inverted ranges,
/// or overlapping events with different non-normal labels.
Scenario generate_scenario(const ScenarioSpec& spec,
                           const ObjectRegistry& objects = default_object_registry());

void validate_scenario(const ScenarioSpec& spec);

/// Ground truth per window: an event label when at least half of the
/// window's frames fall inside events of that label (the larger share wins,
/// registry order on ties), normal otherwise.
std::map<std::size_t, ClassLabel> window_labels(const ScenarioSpec& spec,
                                                std::span<const SequenceWindow> windows,
                                                const LabelRegistry& labels = default_label_registry());

}  // namespace vigil
