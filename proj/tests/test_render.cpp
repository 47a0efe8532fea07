// Copyright 2026 The ettc Authors
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

#include <doctest.h>

#include "ettc/error.hpp"
#include "ettc/fixtures.hpp"
#include "ettc/render.hpp"
#include "probes.hpp"
#include "tempdir.hpp"

using namespace ettc;
using ettc::testing::asterisk_hits;
using ettc::testing::count_color;

TEST_CASE("drawing primitives") {
  RgbImage img(20, 20);
  draw_line(img, {2, 3}, {12, 3}, {1, 1, 1});
  CHECK(count_color(img, {1, 1, 1}) == 11);
  draw_line(img, {0, 0}, {19, 19}, {2, 2, 2});
  for (int i = 0; i < 20; ++i) CHECK(img.at(i, i) == Rgb{2, 2, 2});
  draw_line(img, {-10, 5}, {30, 5}, {3, 3, 3});
  CHECK(count_color(img, {3, 3, 3}) == 20);

  RgbImage star(15, 15);
  draw_asterisk(star, {7, 7}, {9, 9, 9});
  CHECK(asterisk_hits(star, {7, 7}, {9, 9, 9}) == 33);
  CHECK(count_color(star, {9, 9, 9}) == 33);
  RgbImage corner(15, 15);
  draw_asterisk(corner, {0, 0}, {9, 9, 9});
  CHECK(count_color(corner, {9, 9, 9}) == 13);

  RgbImage box(10, 10);
  const std::vector<PixelPoint> sq{{1, 1}, {8, 1}, {8, 8}, {1, 8}};
  draw_polygon_outline(box, sq, {4, 4, 4});
  CHECK(count_color(box, {4, 4, 4}) == 28);
  CHECK(box.at(4, 4) == Rgb{0, 0, 0});
}

TEST_CASE("overlay glyphs at expected coordinates") {
  fixtures::FixtureSpec spec = fixtures::random_spec(41, "r");
  spec.perturbation.tip_shift = {0, -20};
  const fixtures::Fixture f = fixtures::generate(spec);
  const ExtractionResult r = extract(f.detections, spec.pixel_spacing_mm);
  const PixelPoint mp = derive_mp(f.annotation);
  const PixelPoint p9 = carina_gt_point(f.annotation);
  const Overlay o = render_overlay(f.annotation, &r);

  CHECK(o.image.width == spec.width);
  CHECK(o.image.height == spec.height);
  CHECK(asterisk_hits(o.image, *r.tip_point, kPredictionColor) == 33);
  CHECK(asterisk_hits(o.image, *r.carina_point, kPredictionColor) == 33);
  // The tip prediction sits 20 px above the label, clear of its glyph.
  CHECK(asterisk_hits(o.image, mp, kGroundTruthColor) >= 20);
  CHECK(o.image.at(mp.x, mp.y) == kGroundTruthColor);
  // Red is drawn last, so an exact carina hit hides the yellow center.
  CHECK(*r.carina_point == p9);
  CHECK(o.image.at(p9.x, p9.y) == kPredictionColor);
  for (const PixelPoint q : *f.annotation.bifurcation_points) {
    const Rgb c = o.image.at(q.x, q.y);
    CHECK((c == kGroundTruthColor || c == kPredictionColor));
  }
  // Silhouette fills the labeled interior away from the outlines.
  CHECK(o.image.at(p9.x, p9.y - 30) == kSilhouetteColor);
  CHECK(o.image.at(2, 2) == Rgb{0, 0, 0});

  CHECK(o.legend.at("Title") == "r");
  CHECK(o.legend.at("Tip") == "predicted at (" + std::to_string(r.tip_point->x) + ", " +
                                  std::to_string(r.tip_point->y) + ") from box");
  CHECK_FALSE(o.legend.contains("Undetection"));
}

TEST_CASE("undetected carina draws no red carina glyph") {
  fixtures::FixtureSpec spec = fixtures::random_spec(42, "u");
  spec.perturbation.omit_carina_box = true;
  spec.perturbation.omit_carina_mask = true;
  const fixtures::Fixture f = fixtures::generate(spec);
  const ExtractionResult r = extract(f.detections, spec.pixel_spacing_mm);
  REQUIRE_FALSE(r.carina_point);
  const Overlay o = render_overlay(f.annotation, &r);
  const PixelPoint p9 = carina_gt_point(f.annotation);
  CHECK(asterisk_hits(o.image, p9, kPredictionColor) == 0);
  CHECK(asterisk_hits(o.image, p9, kGroundTruthColor) >= 25);
  CHECK(count_color(o.image, kPredictionColor) == 33);
  CHECK(o.legend.at("Carina") == "undetected");
  CHECK(o.legend.at("Undetection") == "yes: no ETT-carina distance");
}

TEST_CASE("ground-truth-only render and backgrounds") {
  const fixtures::Fixture f = fixtures::generate(fixtures::random_spec(43, "g"));
  const Overlay o = render_overlay(f.annotation, nullptr);
  CHECK(count_color(o.image, kPredictionColor) == 0);
  CHECK(asterisk_hits(o.image, derive_mp(f.annotation), kGroundTruthColor) >= 20);
  CHECK(o.legend.at("Prediction") == "none (ground truth only)");

  const RgbImage bg(f.annotation.image_width, f.annotation.image_height, {10, 20, 30});
  const Overlay ob = render_overlay(f.annotation, nullptr, &bg);
  CHECK(ob.image.at(1, 1) == Rgb{10, 20, 30});
  CHECK(count_color(ob.image, kSilhouetteColor) == 0);
  const RgbImage small(5, 5);
  try {
    render_overlay(f.annotation, nullptr, &small);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }

  const ettc::testing::TempDir dir("render");
  write_rgb_png(dir / "o.png", o.image, o.legend);
  CHECK(read_rgb_png(dir / "o.png").pixels == o.image.pixels);
  CHECK(read_png_text(dir / "o.png") == o.legend);
}
