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
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "vigil/core.hpp"

namespace vigil {

/// Per-frame attention field, `height` rows by `width` columns.
using Heatmap = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Throws InvalidParam for empty maps or non-finite values.
void check_heatmap(const Heatmap& h);

struct NormalizedHeatmap {
  Heatmap values;
  /// The input was constant; `values` is all zero.
  bool constant = false;
};

/// Affine map of the values onto [0, 1] (min -> 0, max -> 1).
template <typename Derived>
NormalizedHeatmap normalize(const Eigen::ArrayBase<Derived>& h) {
  if (h.size() == 0 || !h.allFinite())
    throw Error(ErrorKind::InvalidParam, "heatmap must be non-empty and finite");
  NormalizedHeatmap out;
  const double lo = static_cast<double>(h.minCoeff());
  const double hi = static_cast<double>(h.maxCoeff());
  if (!(hi > lo)) {
    out.values = Heatmap::Zero(h.rows(), h.cols());
    out.constant = true;
    return out;
  }
  out.values = (h.template cast<double>() - lo) / (hi - lo);
  return out;
}

using Rgb = std::array<std::uint8_t, 3>;

/// 256-entry blue-to-red ramp.
const std::array<Rgb, 256>& colormap();

/// Blends colormap(h) over the frame: out = (1 - alpha) * frame + alpha * color,
/// rounded and saturated. The map is resampled to the frame size (nearest
/// neighbor) and clamped to [0, 1]. Single-channel frames blend against the
/// color's luma and stay single-channel.
Frame overlay(const Frame& frame, const Heatmap& h, double alpha);

/// Closed boundary on the pixel-corner lattice: point (x, y) is the top-left
/// corner of pixel (x, y). First point equals last.
struct Contour {
  std::vector<Eigen::Vector2i> points;
  double level = 0.0;
  /// Boundary of a hole inside a component (counter-clockwise on screen).
  bool hole = false;
};

/// Boundaries of the superlevel set {h >= level}, traced by marching the
/// 2x2 neighbourhood of every pixel corner. Foreground is 8-connected, so
/// each 8-connected component yields one outer contour and every enclosed
/// 4-connected background region one hole contour. Straight runs are merged.
/// Throws InvalidParam unless 0 < level < 1.
std::vector<Contour> contours(const Heatmap& h, double level);

/// contours() at several levels, one result per level.
std::vector<std::vector<Contour>> contour_levels(const Heatmap& h, std::span<const double> levels);

struct ExplainedFrame {
  Frame overlay;
  std::vector<Contour> contours;
};

/// Normalizes each map, then overlays it on its frame and extracts contours.
/// Throws ShapeMismatch when the sequences differ in length.
std::vector<ExplainedFrame> map_series(std::span<const Frame> frames,
                                       std::span<const Heatmap> heatmaps, double alpha,
                                       double level);

/// {"v":1,"frame":int,"w":int,"h":int,"values":[...]}, values row-major.
struct HeatmapRecord {
  std::size_t frame = 0;
  Heatmap values;
};

std::vector<HeatmapRecord> read_heatmaps(std::istream& in);
nlohmann::json heatmap_to_json(std::size_t frame, const Heatmap& h);
nlohmann::json contours_to_json(std::span<const Contour> cs);

}  // namespace vigil
