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

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vigil/core.hpp"

namespace vigil {

template <std::floating_point S>
void check_box(const BasicBox<S>& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h))
    throw Error(ErrorKind::InvalidBox, "box has non-finite coordinates");
  if (!(b.w > S(0)) || !(b.h > S(0)))
    throw Error(ErrorKind::InvalidBox, "box width and height must be positive");
}

template <typename S>
S area(const BasicBox<S>& b) {
  return b.w * b.h;
}

template <typename S>
Eigen::Matrix<S, 2, 1> center(const BasicBox<S>& b) {
  return {b.x + b.w / S(2), b.y + b.h / S(2)};
}

template <typename S>
Eigen::Matrix<S, 2, 1> top_left(const BasicBox<S>& b) {
  return {b.x, b.y};
}

template <typename S>
Eigen::Matrix<S, 2, 1> bottom_right(const BasicBox<S>& b) {
  return {b.x + b.w, b.y + b.h};
}

template <std::floating_point S>
S intersection_area(const BasicBox<S>& a, const BasicBox<S>& b) {
  const Eigen::Matrix<S, 2, 1> lo = top_left(a).cwiseMax(top_left(b));
  const Eigen::Matrix<S, 2, 1> hi = bottom_right(a).cwiseMin(bottom_right(b));
  const Eigen::Matrix<S, 2, 1> extent = (hi - lo).cwiseMax(S(0));
  return extent.prod();
}

/// Intersection over union, in [0, 1]; 0 for disjoint boxes.
template <std::floating_point S>
S iou(const BasicBox<S>& a, const BasicBox<S>& b) {
  check_box(a);
  check_box(b);
  const S inter = intersection_area(a, b);
  if (inter <= S(0)) return S(0);
  const S uni = area(a) + area(b) - inter;
  return std::clamp(inter / uni, S(0), S(1));
}

/// IoU minus the squared center distance over the squared diagonal of the
/// smallest enclosing box. Lies in (-1, 1].
template <std::floating_point S>
S diou(const BasicBox<S>& a, const BasicBox<S>& b) {
  const S overlap = iou(a, b);
  const Eigen::Matrix<S, 2, 1> lo = top_left(a).cwiseMin(top_left(b));
  const Eigen::Matrix<S, 2, 1> hi = bottom_right(a).cwiseMax(bottom_right(b));
  const S diag2 = (hi - lo).squaredNorm();
  const S dist2 = (center(a) - center(b)).squaredNorm();
  return overlap - dist2 / diag2;
}

/// Closed rectangles share at least one point (edge or corner contact counts).
template <std::floating_point S>
bool touches(const BasicBox<S>& a, const BasicBox<S>& b) {
  check_box(a);
  check_box(b);
  return a.x <= b.x + b.w && b.x <= a.x + a.w && a.y <= b.y + b.h && b.y <= a.y + a.h;
}

/// Greedy class-aware non-maximum suppression.
///
/// Detections below `confidence` are dropped. The rest are visited by
/// descending confidence (ties: smaller box first, then `registry` order,
/// then input order); a detection is kept unless a kept detection of the
/// same class on the same frame overlaps it with IoU > `overlap`. Output is
/// in visiting order.
std::vector<Detection> nms(std::span<const Detection> dets, double confidence,
                           double overlap,
                           const ObjectRegistry& registry = default_object_registry());

/// Score-decay NMS with the DIoU suppression test: instead of removing a
/// same-class, same-frame detection whose DIoU with a kept one exceeds `overlap`, its
/// confidence is multiplied by `decay`. Detections that end below
/// `confidence` are removed at the end.
std::vector<Detection> diou_nms(std::span<const Detection> dets, double confidence,
                                double overlap, double decay = 0.1,
                                const ObjectRegistry& registry = default_object_registry());

}  // namespace vigil
