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

#include "ettc/render.hpp"

#include <cstdlib>

#include "ettc/error.hpp"

namespace ettc {

void draw_line(RgbImage& image, PixelPoint a, PixelPoint b, Rgb color) {
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  int x = a.x;
  int y = a.y;
  while (true) {
    image.set_clipped(x, y, color);
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

void draw_polygon_outline(RgbImage& image, std::span<const PixelPoint> vertices, Rgb color) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    draw_line(image, vertices[i], vertices[(i + 1) % vertices.size()], color);
  }
}

void draw_asterisk(RgbImage& image, PixelPoint center, Rgb color, int radius) {
  const int r = radius;
  draw_line(image, {center.x - r, center.y}, {center.x + r, center.y}, color);
  draw_line(image, {center.x, center.y - r}, {center.x, center.y + r}, color);
  draw_line(image, {center.x - r, center.y - r}, {center.x + r, center.y + r}, color);
  draw_line(image, {center.x - r, center.y + r}, {center.x + r, center.y - r}, color);
}

namespace {

std::string describe(const std::optional<PixelPoint>& p, PointSource source) {
  if (!p) return "undetected";
  return "predicted at (" + std::to_string(p->x) + ", " + std::to_string(p->y) + ") from " +
         std::string(to_string(source));
}

}  // namespace

Overlay render_overlay(const GroundTruthAnnotation& gt, const ExtractionResult* result,
                       const RgbImage* background) {
  Overlay out;
  if (background != nullptr) {
    if (background->width != gt.image_width || background->height != gt.image_height) {
      throw Error(ErrorCode::kDimensionMismatch,
                  gt.image_id + ": background size differs from the annotated image size");
    }
    out.image = *background;
  } else {
    out.image = RgbImage(gt.image_width, gt.image_height);
    const GroundTruthMasks masks = gt_masks(gt);
    for (const auto* m : {&masks.tube, &masks.carina}) {
      if (!*m) continue;
      for (const PixelPoint p : (*m)->foreground()) out.image.set(p.x, p.y, kSilhouetteColor);
    }
  }

  if (gt.ett_points) {
    draw_polygon_outline(out.image, *gt.ett_points, kGroundTruthColor);
  }
  if (gt.bifurcation_points) {
    draw_polygon_outline(out.image, *gt.bifurcation_points, kGroundTruthColor);
  }
  if (gt.ett_points) draw_asterisk(out.image, derive_mp(gt), kGroundTruthColor);
  if (gt.bifurcation_points) draw_asterisk(out.image, carina_gt_point(gt), kGroundTruthColor);

  out.legend["Title"] = gt.image_id;
  out.legend["Legend"] =
      "yellow line: ground truth outline; yellow asterisk: ground truth feature point; "
      "red asterisk: predicted feature point";
  if (result == nullptr) {
    out.legend["Prediction"] = "none (ground truth only)";
    return out;
  }
  if (result->tip_point) draw_asterisk(out.image, *result->tip_point, kPredictionColor);
  if (result->carina_point) draw_asterisk(out.image, *result->carina_point, kPredictionColor);
  out.legend["Tip"] = describe(result->tip_point, result->tip_source);
  out.legend["Carina"] = describe(result->carina_point, result->carina_source);
  if (!result->tip_point || !result->carina_point) {
    out.legend["Undetection"] = "yes: no ETT-carina distance";
  }
  return out;
}

}  // namespace ettc
