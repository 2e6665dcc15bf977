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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <vigil/explain.hpp>
#include <vigil/image.hpp>

#include "oracles.hpp"

using namespace vigil;

namespace {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Heatmap from_mask(const Mask& m) { return m.cast<double>(); }

Mask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  Mask m(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m(y, x) = on(rng);
  return m;
}

Heatmap ring(int side, double r_in, double r_out) {
  Heatmap h(side, side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double r = std::hypot(x + 0.5 - side / 2.0, y + 0.5 - side / 2.0);
      h(y, x) = (r >= r_in && r <= r_out) ? 0.9 : 0.1;
    }
  return h;
}

}  // namespace

TEST(Normalize, ConstantAndIdentity) {
  const auto c = normalize(Heatmap::Constant(3, 4, 7.0));
  EXPECT_TRUE(c.constant);
  EXPECT_TRUE((c.values == 0).all());
  Heatmap h(2, 2);
  h << 0, 0.25, 0.5, 1;
  const auto n = normalize(h);
  EXPECT_FALSE(n.constant);
  EXPECT_TRUE((n.values == h).all());
  EXPECT_THROW(normalize(Heatmap::Constant(1, 1, NAN)), Error);
}

TEST(Normalize, AffineInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5), scale(0.1, 10);
  for (int t = 0; t < 50; ++t) {
    Heatmap h(6, 9);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = u(rng);
    const double a = scale(rng), b = u(rng);
    const auto lhs = normalize(a * h + b).values;
    const auto rhs = normalize(h).values;
    EXPECT_LT((lhs - rhs).abs().maxCoeff(), 1e-12);
    EXPECT_EQ(contours(lhs, 0.4).size(), contours(rhs, 0.4).size());
  }
}

TEST(Overlay, AlphaExtremes) {
  std::mt19937_64 rng(2);
  Frame f(0, 10, 8, 3);
  for (Eigen::Index i = 0; i < f.pixels.size(); ++i) f.pixels.data()[i] = std::uint8_t(rng());
  Heatmap h(4, 5);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = double(rng() % 1000) / 999.0;
  EXPECT_TRUE(same_pixels(overlay(f, h, 0.0), f));

  const auto full = overlay(f, h, 1.0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x) {
      // Nearest-neighbour sample of the 5x4 map.
      const double v = h((2 * y + 1) * 4 / 16, (2 * x + 1) * 5 / 20);
      const auto rgb = colormap()[std::size_t(std::lround(v * 255))];
      for (int c = 0; c < 3; ++c) EXPECT_EQ(full.at(x, y, c), rgb[c]);
    }
}

TEST(Overlay, HalfBlendOnBlackFrame) {
  const Frame f(0, 6, 6, 3, 0);
  const auto out = overlay(f, Heatmap::Ones(3, 3), 0.5);
  const auto top = colormap()[255];
  for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(2, 2, c), std::lround(0.5 * top[c]));
  EXPECT_THROW(overlay(f, Heatmap::Ones(3, 3), 1.5), Error);
}

TEST(Overlay, GrayFramesStayGray) {
  const Frame f(0, 4, 4, 1, 50);
  const auto out = overlay(f, Heatmap::Zero(4, 4), 0.0);
  EXPECT_EQ(out.channels, 1);
  EXPECT_TRUE(same_pixels(out, f));
}

TEST(Contours, EmptyAndSingleRectangle) {
  EXPECT_TRUE(contours(Heatmap::Zero(8, 8), 0.5).empty());
  Heatmap h = Heatmap::Zero(10, 12);
  h.block(2, 3, 4, 5) = 1.0;
  const auto cs = contours(h, 0.5);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_FALSE(cs[0].hole);
  EXPECT_EQ(cs[0].points.front(), cs[0].points.back());
  ASSERT_EQ(cs[0].points.size(), 5u);  // four corners, closed
  const std::vector<Eigen::Vector2i> corners = {{3, 2}, {8, 2}, {8, 6}, {3, 6}};
  for (const auto& c : corners)
    EXPECT_NE(std::find(cs[0].points.begin(), cs[0].points.end(), c), cs[0].points.end());
  EXPECT_THROW(contours(h, 0.0), Error);
  EXPECT_THROW(contours(h, 1.0), Error);
}

TEST(Contours, RingGivesOuterAndHole) {
  const auto cs = contours(ring(32, 6, 11), 0.5);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(std::count_if(cs.begin(), cs.end(), [](const Contour& c) { return c.hole; }), 1);
}

TEST(Contours, BundledRingFixture) {
  std::ifstream in(std::string(VIGIL_DATA_DIR) + "/ring_heatmap.jsonl");
  const auto records = read_heatmaps(in);
  ASSERT_EQ(records.size(), 1u);
  const auto cs = contours(normalize(records[0].values).values, 0.5);
  EXPECT_EQ(cs.size(), 2u);
}

TEST(Contours, FullFrameMask) {
  const auto cs = contours(Heatmap::Ones(5, 7), 0.5);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].points.size(), 5u);
}

TEST(Contours, DiagonalPixelsFormOneComponent) {
  Heatmap h = Heatmap::Zero(4, 4);
  h(1, 1) = h(2, 2) = 1.0;
  EXPECT_EQ(contours(h, 0.5).size(), 1u);
}

TEST(Contours, RandomMasksMatchFloodFillAndReconstruct) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const int w = 3 + int(rng() % 20), h = 3 + int(rng() % 20);
    const Mask m = random_mask(rng, w, h, 0.2 + 0.6 * double(rng() % 100) / 100.0);
    const auto cs = contours(from_mask(m), 0.5);
    const auto comps = oracle::count_components(m);
    const auto holes = std::count_if(cs.begin(), cs.end(), [](const Contour& c) { return c.hole; });
    EXPECT_EQ(long(cs.size()) - holes, comps.foreground);
    EXPECT_EQ(holes, comps.holes);
    const auto filled = oracle::even_odd_fill(cs, w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) ASSERT_EQ(filled[y][x], bool(m(y, x))) << t << ' ' << x << ',' << y;
    for (const auto& c : cs) {
      EXPECT_GE(c.points.size(), 4u);
      EXPECT_EQ(c.points.front(), c.points.back());
    }
  }
}

TEST(MapSeries, ElementwiseAndErrors) {
  std::vector<Frame> frames = {Frame(0, 8, 8, 3, 20), Frame(1, 8, 8, 3, 200)};
  std::vector<Heatmap> maps = {ring(8, 1, 3), Heatmap::Zero(8, 8)};
  maps[1](4, 4) = 3.0;
  const auto out = map_series(frames, maps, 0.4, 0.5);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto n = normalize(maps[i]).values;
    EXPECT_TRUE(same_pixels(out[i].overlay, overlay(frames[i], n, 0.4)));
    EXPECT_EQ(out[i].contours.size(), contours(n, 0.5).size());
  }
  EXPECT_TRUE(map_series({}, {}, 0.5, 0.5).empty());
  try {
    map_series(frames, std::span(maps).first(1), 0.5, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(HeatmapJsonl, RoundTripAndErrors) {
  Heatmap h(2, 3);
  h << 0, 1, 2, 3, 4, 5;
  std::stringstream s;
  s << heatmap_to_json(7, h).dump() << "\n";
  const auto back = read_heatmaps(s);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].frame, 7u);
  EXPECT_TRUE((back[0].values == h).all());

  std::stringstream bad("\n{\"v\":1,\"frame\":0,\"w\":2,\"h\":2,\"values\":[1,2,3]}\n");
  try {
    read_heatmaps(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
