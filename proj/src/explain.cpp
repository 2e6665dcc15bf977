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

#include "vigil/explain.hpp"

#include <algorithm>
#include <istream>

#include "vigil/jsonl.hpp"

namespace vigil {

using nlohmann::json;

void check_heatmap(const Heatmap& h) {
  if (h.rows() < 1 || h.cols() < 1) throw Error(ErrorKind::InvalidParam, "heatmap is empty");
  if (!h.allFinite()) throw Error(ErrorKind::InvalidParam, "heatmap has non-finite values");
}

const std::array<Rgb, 256>& colormap() {
  static const std::array<Rgb, 256> table = [] {
    std::array<Rgb, 256> t{};
    for (int i = 0; i < 256; ++i)
      t[i] = {static_cast<std::uint8_t>(i), 0, static_cast<std::uint8_t>(255 - i)};
    return t;
  }();
  return table;
}

namespace {

std::uint8_t luma(const Rgb& c) {
  return static_cast<std::uint8_t>((77 * c[0] + 150 * c[1] + 29 * c[2] + 128) >> 8);
}

std::uint8_t blend(std::uint8_t base, std::uint8_t color, double alpha) {
  const double v = (1.0 - alpha) * base + alpha * color;
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

}  // namespace

Frame overlay(const Frame& frame, const Heatmap& h, double alpha) {
  check_heatmap(h);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidParam, "alpha must lie in [0,1]");
  const auto& cmap = colormap();
  Frame out = frame;
  for (int y = 0; y < frame.height; ++y) {
    const auto hy = static_cast<Eigen::Index>((2LL * y + 1) * h.rows() / (2LL * frame.height));
    for (int x = 0; x < frame.width; ++x) {
      const auto hx = static_cast<Eigen::Index>((2LL * x + 1) * h.cols() / (2LL * frame.width));
      const double v = std::clamp(h(hy, hx), 0.0, 1.0);
      const Rgb& color = cmap[static_cast<std::size_t>(std::lround(v * 255.0))];
      if (frame.channels == 1) {
        out.at(x, y) = blend(frame.at(x, y), luma(color), alpha);
      } else {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = blend(frame.at(x, y, c), color[c], alpha);
      }
    }
  }
  return out;
}

namespace {

// Headings on screen (y down), clockwise: east, south, west, north.
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

class CornerGraph {
 public:
  CornerGraph(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& mask)
      : w_(static_cast<int>(mask.cols())), h_(static_cast<int>(mask.rows())),
        out_(static_cast<std::size_t>((w_ + 1) * (h_ + 1)), 0),
        used_(out_.size(), 0) {
    auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w_ && y < h_ && mask(y, x); };
    // each foreground pixel contributes its sides that face background,
    // oriented clockwise so the foreground lies to the right
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x) {
        if (!fg(x, y)) continue;
        if (!fg(x, y - 1)) add(x, y, 0);
        if (!fg(x + 1, y)) add(x + 1, y, 1);
        if (!fg(x, y + 1)) add(x + 1, y + 1, 2);
        if (!fg(x - 1, y)) add(x, y + 1, 3);
      }
  }

  std::vector<Contour> trace(double level) {
    std::vector<Contour> result;
    for (int cy = 0; cy <= h_; ++cy)
      for (int cx = 0; cx <= w_; ++cx)
        for (int d = 0; d < 4; ++d)
          if (has(cx, cy, d) && !is_used(cx, cy, d)) result.push_back(follow(cx, cy, d, level));
    return result;
  }

 private:
  std::size_t id(int cx, int cy) const { return static_cast<std::size_t>(cy * (w_ + 1) + cx); }
  void add(int cx, int cy, int d) { out_[id(cx, cy)] |= static_cast<std::uint8_t>(1 << d); }
  bool has(int cx, int cy, int d) const { return out_[id(cx, cy)] & (1 << d); }
  bool is_used(int cx, int cy, int d) const { return used_[id(cx, cy)] & (1 << d); }

  // Outgoing heading at a corner reached while heading `d`. At a saddle
  // (two outgoing sides) the left turn wins, which joins diagonal
  // foreground pixels.
  int next_heading(int cx, int cy, int d) const {
    for (int turn : {3, 0, 1}) {
      const int nd = (d + turn) % 4;
      if (has(cx, cy, nd)) return nd;
    }
    throw Error(ErrorKind::InvalidParam, "open boundary while tracing contour");
  }

  Contour follow(int sx, int sy, int sd, double level) {
    std::vector<Eigen::Vector2i> corners;
    std::vector<int> headings;
    int cx = sx, cy = sy, d = sd;
    do {
      used_[id(cx, cy)] |= static_cast<std::uint8_t>(1 << d);
      corners.emplace_back(cx, cy);
      headings.push_back(d);
      cx += kDx[d];
      cy += kDy[d];
      d = next_heading(cx, cy, d);
    } while (!(cx == sx && cy == sy && d == sd));

    Contour c;
    c.level = level;
    const std::size_t n = corners.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int incoming = headings[(i + n - 1) % n];
      if (incoming != headings[i]) c.points.push_back(corners[i]);
    }
    c.points.push_back(c.points.front());

    long long twice_area = 0;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
      twice_area += static_cast<long long>(c.points[i].x()) * c.points[i + 1].y() -
                    static_cast<long long>(c.points[i + 1].x()) * c.points[i].y();
    c.hole = twice_area < 0;
    return c;
  }

  int w_;
  int h_;
  std::vector<std::uint8_t> out_;
  std::vector<std::uint8_t> used_;
};

}  // namespace

std::vector<Contour> contours(const Heatmap& h, double level) {
  check_heatmap(h);
  if (!(level > 0.0 && level < 1.0))
    throw Error(ErrorKind::InvalidParam, "contour level must lie strictly between 0 and 1");
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask = h >= level;
  return CornerGraph(mask).trace(level);
}

std::vector<std::vector<Contour>> contour_levels(const Heatmap& h, std::span<const double> levels) {
  std::vector<std::vector<Contour>> out;
  out.reserve(levels.size());
  for (double level : levels) out.push_back(contours(h, level));
  return out;
}

std::vector<ExplainedFrame> map_series(std::span<const Frame> frames,
                                       std::span<const Heatmap> heatmaps, double alpha,
                                       double level) {
  if (frames.size() != heatmaps.size())
    throw Error(ErrorKind::ShapeMismatch, "frame and heatmap counts differ");
  std::vector<ExplainedFrame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const NormalizedHeatmap n = normalize(heatmaps[i]);
    out.push_back({overlay(frames[i], n.values, alpha), contours(n.values, level)});
  }
  return out;
}

std::vector<HeatmapRecord> read_heatmaps(std::istream& in) {
  std::vector<HeatmapRecord> records;
  for (const auto& line : read_jsonl(in)) {
    const json& r = line.value;
    auto fail = [&](const std::string& msg) -> void { throw ParseError(line.line, msg); };
    if (!r.contains("v") || r["v"] != kRecordVersion) fail("missing or unsupported \"v\"");
    for (const char* key : {"frame", "w", "h"})
      if (!r.contains(key) || !r[key].is_number_integer() || r[key].get<long long>() < 0)
        fail(std::string("\"") + key + "\" must be a non-negative integer");
    const auto w = r["w"].get<Eigen::Index>();
    const auto h = r["h"].get<Eigen::Index>();
    if (w < 1 || h < 1) fail("heatmap dimensions must be >= 1");
    if (!r.contains("values") || !r["values"].is_array() ||
        static_cast<Eigen::Index>(r["values"].size()) != w * h)
      fail("\"values\" must hold w*h numbers");

    HeatmapRecord rec;
    rec.frame = r["frame"].get<std::size_t>();
    rec.values.resize(h, w);
    Eigen::Index i = 0;
    for (const auto& v : r["values"]) {
      if (!v.is_number()) fail("heatmap values must be numbers");
      rec.values.data()[i++] = v.get<double>();
    }
    if (!rec.values.allFinite()) fail("heatmap values must be finite");
    records.push_back(std::move(rec));
  }
  return records;
}

json heatmap_to_json(std::size_t frame, const Heatmap& h) {
  std::vector<double> values(h.data(), h.data() + h.size());
  return json{{"v", kRecordVersion}, {"frame", frame}, {"w", h.cols()}, {"h", h.rows()},
              {"values", values}};
}

json contours_to_json(std::span<const Contour> cs) {
  json out = json::array();
  for (const auto& c : cs) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back({p.x(), p.y()});
    out.push_back({{"level", c.level}, {"hole", c.hole}, {"points", pts}});
  }
  return out;
}

}  // namespace vigil
