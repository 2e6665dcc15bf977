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

#include "vigil/geometry.hpp"

#include <numeric>

namespace vigil {
namespace {

std::size_t class_rank(const ObjectRegistry& registry, const ObjectClass& cls) {
  const auto& ids = registry.ids();
  auto it = std::find(ids.begin(), ids.end(), cls);
  return static_cast<std::size_t>(it - ids.begin());
}

// true when a should be visited before b
bool visits_before(const Detection& a, const Detection& b, const ObjectRegistry& registry) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  const double area_a = area(a.box);
  const double area_b = area(b.box);
  if (area_a != area_b) return area_a < area_b;
  return class_rank(registry, a.object_class) < class_rank(registry, b.object_class);
}

std::vector<Detection> above_threshold(std::span<const Detection> dets, double confidence) {
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const auto& d : dets) {
    check_box(d.box);
    if (d.confidence >= confidence) kept.push_back(d);
  }
  return kept;
}

}  // namespace

std::vector<Detection> nms(std::span<const Detection> dets, double confidence, double overlap,
                           const ObjectRegistry& registry) {
  std::vector<Detection> candidates = above_threshold(dets, confidence);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Detection& a, const Detection& b) {
                     return visits_before(a, b, registry);
                   });

  std::vector<Detection> kept;
  for (const auto& cand : candidates) {
    bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.object_class == cand.object_class && k.frame_index == cand.frame_index &&
             iou(k.box, cand.box) > overlap;
    });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::vector<Detection> diou_nms(std::span<const Detection> dets, double confidence,
                                double overlap, double decay, const ObjectRegistry& registry) {
  if (!(decay > 0.0 && decay < 1.0))
    throw Error(ErrorKind::InvalidParam, "decay must lie in (0,1)");

  std::vector<Detection> pool = above_threshold(dets, confidence);
  std::vector<Detection> picked;
  picked.reserve(pool.size());
  while (!pool.empty()) {
    // first best in input order, so equal keys keep their original order
    auto best = pool.begin();
    for (auto it = std::next(pool.begin()); it != pool.end(); ++it)
      if (visits_before(*it, *best, registry)) best = it;

    Detection chosen = *best;
    pool.erase(best);
    for (auto& other : pool)
      if (other.object_class == chosen.object_class && other.frame_index == chosen.frame_index &&
          diou(chosen.box, other.box) > overlap)
        other.confidence *= decay;
    picked.push_back(std::move(chosen));
  }

  std::erase_if(picked, [&](const Detection& d) { return d.confidence < confidence; });
  return picked;
}

}  // namespace vigil
