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

#include <random>
#include <sstream>

#include <vigil/image.hpp>
#include <vigil/preprocess.hpp>

using namespace vigil;

namespace {

Frame random_frame(std::mt19937_64& rng, int w, int h, int c, std::size_t index = 0) {
  Frame f(index, w, h, c);
  std::uniform_int_distribution<int> v(0, 255);
  for (Eigen::Index i = 0; i < f.pixels.size(); ++i) f.pixels.data()[i] = std::uint8_t(v(rng));
  return f;
}

int changed_pixels(const Frame& a, const Frame& b) {
  int n = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      bool diff = false;
      for (int c = 0; c < a.channels; ++c) diff |= a.at(x, y, c) != b.at(x, y, c);
      n += diff;
    }
  return n;
}

// In-bounds pixels on the border of the inclusive rectangle [x0,x1]x[y0,y1].
int perimeter_in_bounds(int x0, int y0, int x1, int y1, int w, int h) {
  int n = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const bool border = x == x0 || x == x1 || y == y0 || y == y1;
      n += border && x >= 0 && y >= 0 && x < w && y < h;
    }
  return n;
}

Detection det(double x, double y, double w, double h, const ObjectClass& cls = objects::firearm) {
  return {Box{x, y, w, h}, cls, 0.9, 0};
}

}  // namespace

TEST(PixelRect, CoversEveryTouchedPixel) {
  const auto r = pixel_rect(Box{2.5, 3, 4, 4.2});
  EXPECT_EQ(r.x0, 2);
  EXPECT_EQ(r.x1, 6);
  EXPECT_EQ(r.y0, 3);
  EXPECT_EQ(r.y1, 7);
}

TEST(DrawBoxes, NoDetectionsIsIdentity) {
  std::mt19937_64 rng(1);
  const auto f = random_frame(rng, 16, 12, 3);
  EXPECT_TRUE(same_pixels(draw_boxes(f, {}), f));
}

TEST(DrawBoxes, ExactlyThePerimeterChanges) {
  const Frame f(0, 20, 16, 3, 0);
  const std::vector<Detection> d = {det(2, 3, 5, 4)};
  const auto out = draw_boxes(f, d);
  EXPECT_EQ(changed_pixels(f, out), perimeter_in_bounds(2, 3, 6, 6, 20, 16));
  EXPECT_EQ(changed_pixels(f, out), 14);
  EXPECT_NE(out.at(2, 3, 0), 0);
  EXPECT_EQ(out.at(3, 4, 0), 0);
}

TEST(DrawBoxes, ClipsToFrame) {
  const Frame f(0, 10, 10, 1, 0);
  const std::vector<Detection> d = {det(-3, -3, 8, 8), det(7, 7, 10, 2, objects::flame)};
  const auto out = draw_boxes(f, d);
  // First box spans pixels -3..4; second spans x 7..16, y 7..8.
  EXPECT_EQ(changed_pixels(f, out),
            perimeter_in_bounds(-3, -3, 4, 4, 10, 10) + perimeter_in_bounds(7, 7, 16, 8, 10, 10));
}

TEST(DrawBoxes, ColorIsPerClass) {
  const auto reg = default_object_registry();
  EXPECT_NE(class_color(objects::firearm, reg).rgb, class_color(objects::flame, reg).rgb);
  EXPECT_THROW(class_color(ObjectClass{"knife"}, reg), Error);
}

TEST(BoxMask, ZeroDetections) {
  std::mt19937_64 rng(2);
  const auto f = random_frame(rng, 8, 8, 3);
  const auto black = apply_box_mask(f, {}, MaskBackground::Black);
  EXPECT_TRUE((black.pixels == 0).all());
  EXPECT_TRUE(same_pixels(apply_box_mask(f, {}, MaskBackground::Original), f));
}

TEST(BoxMask, KeepsInsideZeroesOutside) {
  std::mt19937_64 rng(3);
  const auto f = random_frame(rng, 12, 10, 3);
  const std::vector<Detection> d = {det(2, 2, 3, 3), det(8, 5, 2, 2)};
  for (auto bg : {MaskBackground::Black, MaskBackground::Original}) {
    const auto out = apply_box_mask(f, d, bg);
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        const bool inside = (x >= 2 && x <= 4 && y >= 2 && y <= 4) || (x >= 8 && x <= 9 && y >= 5 && y <= 6);
        for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y, c), inside ? f.at(x, y, c) : 0);
      }
    EXPECT_TRUE((out.pixels <= f.pixels).all());
  }
  const std::vector<Detection> whole = {det(0, 0, 12, 10)};
  EXPECT_TRUE(same_pixels(apply_box_mask(f, whole, MaskBackground::Black), f));
}

TEST(FrameDifference, MatchesNaiveLoop) {
  std::mt19937_64 rng(4);
  const auto a = random_frame(rng, 9, 7, 3), b = random_frame(rng, 9, 7, 3);
  const auto d = frame_difference(a, b);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(d.at(x, y, c), std::abs(int(a.at(x, y, c)) - int(b.at(x, y, c))));
  EXPECT_TRUE((frame_difference(a, a).pixels == 0).all());
  EXPECT_TRUE((frame_difference(Frame(0, 4, 4, 1, 100), Frame(0, 4, 4, 1, 130)).pixels == 30).all());
  try {
    frame_difference(a, Frame(0, 9, 7, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Augment, MirrorBrightnessZoom) {
  std::mt19937_64 rng(5);
  const auto f = random_frame(rng, 10, 6, 3);
  const auto m = augment(f, MirrorH{});
  EXPECT_EQ(m.at(0, 2, 1), f.at(9, 2, 1));
  EXPECT_TRUE(same_pixels(augment(m, MirrorH{}), f));
  EXPECT_TRUE((augment(Frame(0, 4, 4, 1, 240), Brightness{30}).pixels == 255).all());
  EXPECT_TRUE((augment(Frame(0, 4, 4, 1, 10), Brightness{-30}).pixels == 0).all());
  EXPECT_TRUE(same_pixels(augment(f, Zoom{1.0}), f));
  EXPECT_THROW(augment(f, Zoom{0.5}), Error);

  // Zoom 2 on a 4x4 frame samples the central 2x2 block.
  Frame g(0, 4, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) g.at(x, y) = std::uint8_t(10 * y + x);
  const auto z = augment(g, Zoom{2.0});
  EXPECT_EQ(z.width, 4);
  EXPECT_EQ(z.at(0, 0), 11);
  EXPECT_EQ(z.at(3, 3), 22);
}

TEST(Resize, CheckerboardDownsample) {
  Frame big(0, 224, 224, 1);
  for (int y = 0; y < 224; ++y)
    for (int x = 0; x < 224; ++x) big.at(x, y) = ((x / 2 + y / 2) % 2) ? 255 : 0;
  const auto small = resize(big, 112);
  ASSERT_EQ(small.width, 112);
  for (int y = 0; y < 112; ++y)
    for (int x = 0; x < 112; ++x) ASSERT_EQ(small.at(x, y), ((x + y) % 2) ? 255 : 0);
}

TEST(Resize, ShapesAndIdentity) {
  std::mt19937_64 rng(6);
  const auto f = random_frame(rng, 112, 112, 3);
  EXPECT_TRUE(same_pixels(resize(f, 112), f));
  const auto r = resize(random_frame(rng, 100, 50, 3), 112);
  EXPECT_EQ(r.width, 112);
  EXPECT_EQ(r.height, 112);
  EXPECT_EQ(r.channels, 3);
}

TEST(Pnm, RoundTrip) {
  std::mt19937_64 rng(7);
  for (int c : {1, 3}) {
    const auto f = random_frame(rng, 13, 5, c);
    std::stringstream s;
    write_pnm(s, f);
    EXPECT_TRUE(same_pixels(read_pnm(s), f));
  }
  std::stringstream bad("P3\n1 1\n255\n0 0 0\n");
  EXPECT_THROW(read_pnm(bad), Error);
}
