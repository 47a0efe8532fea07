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

#include <algorithm>
#include <cmath>
#include <random>

#include "ettc/error.hpp"
#include "ettc/extraction.hpp"
#include "ettc/fixtures.hpp"
#include "oracles.hpp"

using namespace ettc;

namespace {

BinaryMask filled_rect(int w, int h, int x0, int y0, int x1, int y1) {
  BinaryMask m(w, h);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  }
  return m;
}

void draw_segment(BinaryMask& m, PixelPoint a, PixelPoint b) {
  const int n = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
  for (int i = 0; i <= n; ++i) {
    const double t = n == 0 ? 0.0 : static_cast<double>(i) / n;
    m.set(static_cast<int>(std::lround(a.x + t * (b.x - a.x))),
          static_cast<int>(std::lround(a.y + t * (b.y - a.y))));
  }
}

/// Carina feature point composed from oracle stages around the library's
/// skeleton: brute-force densest skeleton window, brute-force boundary,
/// hand-clamped patch, then the nearest-to-center densest edge window.
PixelPoint composed_carina(const BinaryMask& mask) {
  const BinaryMask skel = skeletonize(mask);
  const PixelPoint c = oracle::densest(skel, skel, 15, 15);
  const BinaryMask edges = oracle::boundary(mask);
  const int pw = std::min(100, mask.width());
  const int ph = std::min(150, mask.height());
  const int ox = std::clamp(c.x - pw / 2, 0, mask.width() - pw);
  const int oy = std::clamp(c.y - ph / 2, 0, mask.height() - ph);
  BinaryMask patch(pw, ph);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) patch.set(x, y, edges.get(x + ox, y + oy));
  }
  if (patch.empty()) return c;
  const PixelPoint local = oracle::densest_near(patch, patch, 7, 7, {c.x - ox, c.y - oy});
  return {local.x + ox, local.y + oy};
}

ScoredDetection box_det(DetectionClass cls, double score, double cx, double cy) {
  return {cls, score, std::nullopt, BoxRegion{cx, cy, 48, 48}};
}

}  // namespace

TEST_CASE("tip from mask") {
  SUBCASE("3-wide vertical tube ending at row 400") {
    const BinaryMask m = filled_rect(300, 480, 149, 250, 151, 400);
    const PixelPoint p = tip_from_mask(m);
    CHECK((p.y == 399 || p.y == 400));
    // The last skeleton pixel steps one column toward the lower right corner.
    CHECK(p.x == 151);
    CHECK(skeletonize(m).get(150, 398));
  }
  SUBCASE("thin line is its own skeleton") {
    BinaryMask m(20, 40);
    draw_segment(m, {5, 0}, {5, 30});
    CHECK(tip_from_mask(m) == PixelPoint{5, 30});
  }
  SUBCASE("empty mask") {
    try {
      tip_from_mask(BinaryMask(10, 10));
      FAIL("expected EmptyMask");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptyMask);
    }
  }
  SUBCASE("random thin polylines: lowest pixel, leftmost on ties") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 80; ++i) {
      BinaryMask m(60, 60);
      PixelPoint a{oracle::uniform(rng, 2, 57), oracle::uniform(rng, 2, 20)};
      for (int k = 0; k < 3; ++k) {
        const PixelPoint b{oracle::uniform(rng, 2, 57), oracle::uniform(rng, 2, 57)};
        draw_segment(m, a, b);
        a = b;
      }
      const BinaryMask skel = skeletonize(m);
      PixelPoint want{-1, -1};
      for (int y = 0; y < 60; ++y) {
        for (int x = 0; x < 60; ++x) {
          if (skel.get(x, y) && (y > want.y || (y == want.y && x < want.x))) want = {x, y};
        }
      }
      CHECK(tip_from_mask(m) == want);
    }
  }
  // Wide ends bend toward a corner, so only a half-width envelope holds.
  SUBCASE("random wide strips end near their far end") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 40; ++i) {
      const int half = oracle::uniform(rng, 1, 3);
      const int x = oracle::uniform(rng, 20, 80);
      const int y1 = oracle::uniform(rng, 60, 150);
      const BinaryMask m = filled_rect(100, 160, x - half, 10, x + half, y1);
      const PixelPoint p = tip_from_mask(m);
      CHECK(std::abs(p.x - x) <= half);
      CHECK(p.y <= y1);
      CHECK(p.y >= y1 - half);
    }
  }
}

TEST_CASE("carina from mask") {
  SUBCASE("inverted Y: central point is the branch pixel") {
    BinaryMask m(400, 500);
    draw_segment(m, {200, 150}, {200, 300});
    draw_segment(m, {200, 300}, {80, 420});
    draw_segment(m, {200, 300}, {320, 420});
    const BinaryMask skel = skeletonize(m);
    CHECK(oracle::densest(skel, skel, 15, 15) == PixelPoint{200, 300});
    const CarinaMaskPoint c = carina_from_mask(m);
    CHECK(c.central == PixelPoint{200, 300});
    CHECK_FALSE(c.fallback);
    CHECK(c.point == composed_carina(m));
  }
  SUBCASE("V-notch airway: point within 7 px of the notch apex") {
    fixtures::BifurcationGeometry g;
    g.apex = {220, 300};
    const auto outline = fixtures::bifurcation_outline(g);
    const BinaryMask m = oracle::fill_polygon(outline, 450, 500);
    const CarinaMaskPoint c = carina_from_mask(m);
    CHECK(euclidean(c.point, g.apex) <= 7.0);
    CHECK(c.point == composed_carina(m));
  }
  SUBCASE("degenerate inputs return a point") {
    BinaryMask line(100, 100);
    draw_segment(line, {10, 10}, {90, 60});
    const CarinaMaskPoint a = carina_from_mask(line);
    CHECK(line.get(a.point.x, a.point.y));
    CHECK(carina_from_mask(line).point == a.point);

    BinaryMask dot(50, 50);
    dot.set(7, 9);
    const CarinaMaskPoint b = carina_from_mask(dot);
    CHECK(b.point == PixelPoint{7, 9});
    CHECK(b.central == PixelPoint{7, 9});
  }
  SUBCASE("edgeless patch falls back to the central point, flagged") {
    const BinaryMask m = filled_rect(500, 500, 50, 50, 449, 449);
    const CarinaMaskPoint c = carina_from_mask(m);
    CHECK(c.fallback);
    CHECK(c.point == c.central);
    CHECK(m.get(c.point.x, c.point.y));
  }
  SUBCASE("random blobs: composition matches the oracle stages and never throws") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 40; ++i) {
      const BinaryMask m = oracle::random_blob(rng, 120, 170, oracle::uniform(rng, 1, 4));
      if (m.empty()) continue;
      const CarinaMaskPoint c = carina_from_mask(m);
      CHECK(c.point == composed_carina(m));
      CHECK(m.contains(c.point.x, c.point.y));
    }
  }
}

TEST_CASE("point from box") {
  CHECK(point_from_box({100, 100, 48, 48}) == PixelPoint{100, 100});
  CHECK(point_from_box({10.5, 20.5, 48, 48}) == PixelPoint{11, 21});
  CHECK(point_from_box({10.49, 20.51, 4, 4}) == PixelPoint{10, 21});
  CHECK(point_from_box({-3.0, 700.0, 48, 48}) == PixelPoint{-3, 700});
}

TEST_CASE("tip fusion truth table") {
  const PixelPoint b{100, 200};
  const PixelPoint m{300, 400};
  CHECK(fuse_tip(b, m) == FusedPoint{b, PointSource::kBox});
  CHECK(fuse_tip(b, std::nullopt) == FusedPoint{b, PointSource::kBox});
  CHECK(fuse_tip(std::nullopt, m) == FusedPoint{m, PointSource::kMask});
  CHECK(fuse_tip(std::nullopt, std::nullopt) == FusedPoint{});
}

TEST_CASE("carina fusion") {
  const PixelPoint o{0, 0};
  CHECK(fuse_carina(o, PixelPoint{120, 0}) == FusedPoint{PixelPoint{120, 0}, PointSource::kMask});
  CHECK(fuse_carina(o, PixelPoint{60, 80}) == FusedPoint{o, PointSource::kBox});
  CHECK(fuse_carina(std::nullopt, PixelPoint{50, 50}) ==
        FusedPoint{PixelPoint{50, 50}, PointSource::kMask});
  CHECK(fuse_carina(o, std::nullopt) == FusedPoint{o, PointSource::kBox});
  CHECK(fuse_carina(std::nullopt, std::nullopt) == FusedPoint{});
  CHECK(fuse_carina(o, PixelPoint{60, 80}, 99.0).source == PointSource::kMask);

  std::mt19937_64 rng(14);
  int switched = 0;
  for (int i = 0; i < 1000; ++i) {
    const PixelPoint b{oracle::uniform(rng, 0, 300), oracle::uniform(rng, 0, 300)};
    const PixelPoint m{b.x + oracle::uniform(rng, -140, 140), b.y + oracle::uniform(rng, -140, 140)};
    const auto dx = static_cast<long>(m.x - b.x);
    const auto dy = static_cast<long>(m.y - b.y);
    const bool far = dx * dx + dy * dy > 100L * 100L;
    const FusedPoint f = fuse_carina(b, m);
    CHECK((f.source == PointSource::kMask) == far);
    CHECK(*f.point == (far ? m : b));
    switched += far ? 1 : 0;
  }
  CHECK(switched > 100);
  CHECK(switched < 900);
}

TEST_CASE("extract") {
  SUBCASE("box points give the distance") {
    const DetectionSet set{"a",
                           {box_det(DetectionClass::kTubeTipBox, 0.9, 100, 100),
                            box_det(DetectionClass::kCarinaBox, 0.8, 100, 500)}};
    const ExtractionResult r = extract(set, 0.5);
    CHECK(r.image_id == "a");
    CHECK(r.tip_point == PixelPoint{100, 100});
    CHECK(r.carina_point == PixelPoint{100, 500});
    CHECK(r.distance_px == 400.0);
    CHECK(r.distance_mm == 200.0);
  }
  SUBCASE("undetected carina leaves the distance absent") {
    const DetectionSet set{"a", {box_det(DetectionClass::kTubeTipBox, 0.9, 100, 100)}};
    const ExtractionResult r = extract(set, 0.5);
    CHECK(r.tip_source == PointSource::kBox);
    CHECK_FALSE(r.carina_point);
    CHECK(r.carina_source == PointSource::kNone);
    CHECK_FALSE(r.distance_px);
    CHECK_FALSE(r.distance_mm);
  }
  SUBCASE("nothing detected") {
    const ExtractionResult r = extract({"e", {}}, 0.5);
    CHECK_FALSE(r.tip_point);
    CHECK_FALSE(r.carina_point);
  }
  SUBCASE("highest score per class wins") {
    const DetectionSet set{"a",
                           {box_det(DetectionClass::kTubeTipBox, 0.4, 10, 10),
                            box_det(DetectionClass::kTubeTipBox, 0.7, 30, 40),
                            box_det(DetectionClass::kCarinaBox, 0.5, 30, 90)}};
    const ExtractionResult r = extract(set, 1.0);
    CHECK(r.tip_point == PixelPoint{30, 40});
    CHECK(r.distance_px == 50.0);
  }
}

TEST_CASE("extract on fixtures matches hand composition and envelopes") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const fixtures::FixtureSpec spec = fixtures::random_spec(seed, "f" + std::to_string(seed));
    const fixtures::Fixture fx = fixtures::generate(spec);
    const ExtractionResult r = extract(fx.detections, spec.pixel_spacing_mm);

    // Hand composition of the stage operations.
    const SelectedDetections sel = select_max_score(fx.detections);
    std::optional<PixelPoint> tip_mask;
    std::optional<PixelPoint> tip_box;
    std::optional<PixelPoint> car_mask;
    std::optional<PixelPoint> car_box;
    if (sel.tube) tip_mask = tip_from_mask(*sel.tube->mask);
    if (sel.tube_tip_box) tip_box = point_from_box(*sel.tube_tip_box->box);
    if (sel.carina) car_mask = carina_from_mask(*sel.carina->mask).point;
    if (sel.carina_box) car_box = point_from_box(*sel.carina_box->box);
    const FusedPoint tip = fuse_tip(tip_box, tip_mask);
    const FusedPoint car = fuse_carina(car_box, car_mask);
    CHECK(r.tip_mask_point == tip_mask);
    CHECK(r.carina_mask_point == car_mask);
    CHECK(r.tip_point == tip.point);
    CHECK(r.carina_point == car.point);
    REQUIRE(r.distance_px);
    CHECK(*r.distance_px == euclidean(*tip.point, *car.point));
    CHECK(*r.distance_mm == *r.distance_px * spec.pixel_spacing_mm);
    CHECK(*r.distance_mm / *r.distance_px == doctest::Approx(spec.pixel_spacing_mm).epsilon(1e-15));

    const fixtures::ExpectedEnvelope& ex = fx.expected;
    CHECK(r.tip_source == ex.tip_source);
    CHECK(r.carina_source == ex.carina_source);
    CHECK(euclidean(*r.tip_point, *ex.tip) <= ex.tip_radius_px);
    CHECK(euclidean(*r.carina_point, *ex.carina) <= ex.carina_radius_px);
  }
}

TEST_CASE("fixture dropouts route through the mask") {
  fixtures::FixtureSpec spec = fixtures::random_spec(77, "drop");
  SUBCASE("carina box 150 px from the mask point") {
    spec.perturbation.carina_box_offset = {150, 0};
    const fixtures::Fixture fx = fixtures::generate(spec);
    const ExtractionResult r = extract(fx.detections, spec.pixel_spacing_mm);
    CHECK(r.carina_source == PointSource::kMask);
    CHECK(euclidean(*r.carina_point, *fx.expected.carina_mask_nominal) <=
          fixtures::kMaskQuantizationPx);
  }
  SUBCASE("tip box missing") {
    spec.perturbation.omit_tip_box = true;
    const fixtures::Fixture fx = fixtures::generate(spec);
    const ExtractionResult r = extract(fx.detections, spec.pixel_spacing_mm);
    CHECK(r.tip_source == PointSource::kMask);
    CHECK(r.tip_point == r.tip_mask_point);
    CHECK(euclidean(*r.tip_point, *fx.expected.tip_mask_nominal) <= fixtures::kMaskQuantizationPx);
  }
  SUBCASE("carina box missing") {
    spec.perturbation.omit_carina_box = true;
    const fixtures::Fixture fx = fixtures::generate(spec);
    const ExtractionResult r = extract(fx.detections, spec.pixel_spacing_mm);
    CHECK(r.carina_source == PointSource::kMask);
  }
}

TEST_CASE("extract_all is deterministic across thread counts") {
  std::vector<DetectionSet> sets;
  std::vector<double> spacings;
  for (std::uint64_t seed = 100; seed < 116; ++seed) {
    const auto fx = fixtures::generate(fixtures::random_spec(seed, "d" + std::to_string(seed)));
    sets.push_back(fx.detections);
    spacings.push_back(fx.annotation.pixel_spacing_mm);
  }
  const auto one = extract_all(sets, spacings, {}, 1);
  for (const unsigned jobs : {2U, 3U, 8U, 0U}) {
    CHECK(extract_all(sets, spacings, {}, jobs) == one);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) CHECK(one[i] == extract(sets[i], spacings[i]));
  spacings.pop_back();
  CHECK_THROWS_AS(extract_all(sets, spacings, {}, 1), Error);
}
