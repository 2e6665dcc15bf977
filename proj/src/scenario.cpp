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

#include "vigil/scenario.hpp"

#include <algorithm>
#include <random>

#include "vigil/preprocess.hpp"

namespace vigil {

void validate_scenario(const ScenarioSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidScenario, msg); };
  if (spec.width < 8 || spec.height < 8) fail("frames must be at least 8x8");
  if (spec.channels != 1 && spec.channels != 3) fail("channels must be 1 or 3");
  for (const auto& e : spec.events) {
    if (e.start > e.end) fail("event starts after it ends");
    if (e.end >= spec.n_frames) fail("event runs past the last frame");
    for (const auto& o : e.objects)
      if (o.start && (o.start->w <= 0 || o.start->h <= 0 || o.start->w > spec.width ||
                      o.start->h > spec.height))
        fail("object size must be positive and fit in the frame");
  }
  for (std::size_t i = 0; i < spec.events.size(); ++i)
    for (std::size_t j = i + 1; j < spec.events.size(); ++j) {
      const auto& a = spec.events[i];
      const auto& b = spec.events[j];
      const bool overlap = a.start <= b.end && b.start <= a.end;
      if (overlap && a.label != b.label && a.label != labels::normal && b.label != labels::normal)
        fail("events '" + a.label.str() + "' and '" + b.label.str() + "' overlap");
    }
}

namespace {

// Position after `t` steps of speed `v` inside [0, span], reflecting at the ends.
int bounce(int p0, int v, long t, int span) {
  if (span <= 0) return 0;
  const long period = 2L * span;
  long p = (p0 + static_cast<long>(v) * t) % period;
  if (p < 0) p += period;
  return static_cast<int>(p <= span ? p : period - p);
}

struct Track {
  ObjectClass cls;
  BasicBox<int> start;
  Eigen::Vector2i velocity;
  std::size_t first;
  std::size_t last;
};

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec, const ObjectRegistry& objects) {
  validate_scenario(spec);
  std::mt19937_64 rng(spec.seed);
  auto draw = [&](int lo, int hi) {  // inclusive, platform-independent
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  const auto background = static_cast<std::uint8_t>(draw(40, 90));
  std::vector<Track> tracks;
  for (const auto& e : spec.events) {
    for (const auto& o : e.objects) {
      objects.index_of(o.object_class);
      Track t{o.object_class, {}, {}, e.start, e.end};
      if (o.start) {
        t.start = *o.start;
      } else {
        const int w = draw(std::max(4, spec.width / 10), std::max(4, spec.width / 4));
        const int h = draw(std::max(4, spec.height / 10), std::max(4, spec.height / 4));
        t.start = {draw(0, spec.width - w), draw(0, spec.height - h), w, h};
      }
      t.velocity = o.velocity ? *o.velocity : Eigen::Vector2i(draw(-2, 2), draw(-2, 2));
      tracks.push_back(t);
    }
  }

  Scenario out;
  out.frames.reserve(spec.n_frames);
  for (std::size_t f = 0; f < spec.n_frames; ++f) {
    Frame frame(f, spec.width, spec.height, spec.channels, background);
    for (const auto& t : tracks) {
      if (f < t.first || f > t.last) continue;
      const long step = static_cast<long>(f - t.first);
      const int span_x = spec.width - t.start.w;
      const int span_y = spec.height - t.start.h;
      const int x = bounce(std::clamp(t.start.x, 0, span_x), t.velocity.x(), step, span_x);
      const int y = bounce(std::clamp(t.start.y, 0, span_y), t.velocity.y(), step, span_y);

      const Color color = class_color(t.cls, objects);
      for (int yy = y; yy < y + t.start.h; ++yy)
        for (int xx = x; xx < x + t.start.w; ++xx) {
          if (spec.channels == 1) frame.at(xx, yy) = color.gray;
          else
            for (int c = 0; c < 3; ++c) frame.at(xx, yy, c) = color.rgb[c];
        }
      out.gt_detections.push_back(
          {Box{double(x), double(y), double(t.start.w), double(t.start.h)}, t.cls, 1.0, f});
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

std::map<std::size_t, ClassLabel> window_labels(const ScenarioSpec& spec,
                                                std::span<const SequenceWindow> windows,
                                                const LabelRegistry& labels) {
  std::map<std::size_t, ClassLabel> out;
  for (const auto& w : windows) {
    ClassLabel best = labels::normal;
    std::size_t best_count = 0;
    for (const auto& label : labels.ids()) {
      if (label == labels::normal) continue;
      std::size_t inside = 0;
      for (std::size_t idx : w.frame_indices) {
        const bool covered = std::any_of(spec.events.begin(), spec.events.end(), [&](const auto& e) {
          return e.label == label && idx >= e.start && idx <= e.end;
        });
        if (covered) ++inside;
      }
      if (2 * inside >= w.frame_indices.size() && inside > best_count) {
        best = label;
        best_count = inside;
      }
    }
    out[w.window_id] = best;
  }
  return out;
}

}  // namespace vigil
