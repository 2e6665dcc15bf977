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

#include <array>
#include <cstdint>
#include <span>
#include <variant>

#include "vigil/core.hpp"

namespace vigil {

/// Inclusive pixel rectangle covered by a box: columns floor(x) .. ceil(x+w)-1.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

PixelRect pixel_rect(const Box& box);

struct Color {
  std::array<std::uint8_t, 3> rgb;
  std::uint8_t gray;
};

/// Outline color for an object class, fixed by its position in `registry`.
/// Throws UnknownClass for classes outside the registry.
Color class_color(const ObjectClass& cls, const ObjectRegistry& registry);

/// Copy of `frame` with a 1-pixel outline per detection. Outline pixels
/// outside the frame are skipped.
Frame draw_boxes(const Frame& frame, std::span<const Detection> dets,
                 const ObjectRegistry& registry = default_object_registry());

enum class MaskBackground { Black, Original };

/// Keeps pixels inside any detection box and zeroes the rest. A frame with
/// no detections becomes black (Black) or is returned unchanged (Original).
Frame apply_box_mask(const Frame& frame, std::span<const Detection> dets,
                     MaskBackground background);

/// Per-sample |a - b|. Throws ShapeMismatch on differing dimensions.
Frame frame_difference(const Frame& a, const Frame& b);

struct MirrorH {};
struct Brightness {
  int delta = 0;
};
struct Zoom {
  double factor = 1.0;
};
using Augmentation = std::variant<MirrorH, Brightness, Zoom>;

/// MirrorH flips columns; Brightness adds a saturating offset; Zoom crops the
/// central 1/factor region and scales it back up (nearest neighbor).
Frame augment(const Frame& frame, const Augmentation& op);

/// Nearest-neighbor resize; source sample for output column x is
/// floor((x + 0.5) * src_width / width).
Frame resize(const Frame& frame, int width, int height);
inline Frame resize(const Frame& frame, int side) { return resize(frame, side, side); }

}  // namespace vigil
