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

#include "vigil/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace vigil {

PixelRect pixel_rect(const Box& box) {
  return {static_cast<int>(std::floor(box.x)), static_cast<int>(std::floor(box.y)),
          static_cast<int>(std::ceil(box.x + box.w)) - 1,
          static_cast<int>(std::ceil(box.y + box.h)) - 1};
}

Color class_color(const ObjectClass& cls, const ObjectRegistry& registry) {
  static constexpr std::array<Color, 6> palette{{
      {{255, 0, 0}, 255},
      {{255, 160, 0}, 200},
      {{0, 255, 0}, 150},
      {{0, 128, 255}, 100},
      {{255, 0, 255}, 50},
      {{255, 255, 0}, 225},
  }};
  return palette[registry.index_of(cls) % palette.size()];
}

namespace {

void paint(Frame& f, int x, int y, const Color& color) {
  if (x < 0 || y < 0 || x >= f.width || y >= f.height) return;
  if (f.channels == 1) {
    f.at(x, y) = color.gray;
  } else {
    for (int c = 0; c < 3; ++c) f.at(x, y, c) = color.rgb[c];
  }
}

}  // namespace

Frame draw_boxes(const Frame& frame, std::span<const Detection> dets,
                 const ObjectRegistry& registry) {
  Frame out = frame;
  for (const auto& det : dets) {
    const PixelRect r = pixel_rect(det.box);
    const Color color = class_color(det.object_class, registry);
    for (int x = r.x0; x <= r.x1; ++x) {
      paint(out, x, r.y0, color);
      paint(out, x, r.y1, color);
    }
    for (int y = r.y0 + 1; y < r.y1; ++y) {
      paint(out, r.x0, y, color);
      paint(out, r.x1, y, color);
    }
  }
  return out;
}

Frame apply_box_mask(const Frame& frame, std::span<const Detection> dets,
                     MaskBackground background) {
  if (dets.empty() && background == MaskBackground::Original) return frame;

  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> keep =
      Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(
          frame.height, frame.width, false);
  for (const auto& det : dets) {
    PixelRect r = pixel_rect(det.box);
    r.x0 = std::max(r.x0, 0);
    r.y0 = std::max(r.y0, 0);
    r.x1 = std::min(r.x1, frame.width - 1);
    r.y1 = std::min(r.y1, frame.height - 1);
    if (r.x0 > r.x1 || r.y0 > r.y1) continue;
    keep.block(r.y0, r.x0, r.y1 - r.y0 + 1, r.x1 - r.x0 + 1).setConstant(true);
  }

  Frame out = frame;
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      if (!keep(y, x))
        for (int c = 0; c < frame.channels; ++c) out.at(x, y, c) = 0;
  return out;
}

Frame frame_difference(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "frames differ in shape");
  Frame out = a;
  out.pixels = (a.pixels.cast<int>() - b.pixels.cast<int>()).abs().cast<std::uint8_t>();
  return out;
}

namespace {

struct Augmenter {
  const Frame& in;

  Frame operator()(const MirrorH&) const {
    Frame out = in;
    for (int y = 0; y < in.height; ++y)
      for (int x = 0; x < in.width; ++x)
        for (int c = 0; c < in.channels; ++c) out.at(x, y, c) = in.at(in.width - 1 - x, y, c);
    return out;
  }

  Frame operator()(const Brightness& b) const {
    Frame out = in;
    out.pixels = (in.pixels.cast<int>() + b.delta).max(0).min(255).cast<std::uint8_t>();
    return out;
  }

  Frame operator()(const Zoom& z) const {
    if (!std::isfinite(z.factor) || z.factor < 1.0)
      throw Error(ErrorKind::InvalidParam, "zoom factor must be >= 1");
    const double crop_w = in.width / z.factor;
    const double crop_h = in.height / z.factor;
    const double x0 = (in.width - crop_w) / 2.0;
    const double y0 = (in.height - crop_h) / 2.0;
    Frame out = in;
    for (int y = 0; y < in.height; ++y) {
      int sy = static_cast<int>(std::floor(y0 + (y + 0.5) * crop_h / in.height));
      sy = std::clamp(sy, 0, in.height - 1);
      for (int x = 0; x < in.width; ++x) {
        int sx = static_cast<int>(std::floor(x0 + (x + 0.5) * crop_w / in.width));
        sx = std::clamp(sx, 0, in.width - 1);
        for (int c = 0; c < in.channels; ++c) out.at(x, y, c) = in.at(sx, sy, c);
      }
    }
    return out;
  }
};

}  // namespace

Frame augment(const Frame& frame, const Augmentation& op) {
  return std::visit(Augmenter{frame}, op);
}

Frame resize(const Frame& frame, int width, int height) {
  if (width < 1 || height < 1) throw Error(ErrorKind::InvalidParam, "resize target must be positive");
  Frame out(frame.index, width, height, frame.channels);
  out.timestamp_ms = frame.timestamp_ms;
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>((2LL * y + 1) * frame.height / (2LL * height));
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>((2LL * x + 1) * frame.width / (2LL * width));
      for (int c = 0; c < frame.channels; ++c) out.at(x, y, c) = frame.at(sx, sy, c);
    }
  }
  return out;
}

}  // namespace vigil
