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

#include "ettc/annotation.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>

#include "ettc/error.hpp"

namespace ettc {

namespace {

std::string point_text(PixelPoint p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

template <std::size_t N>
void check_points(const std::array<PixelPoint, N>& pts, const GroundTruthAnnotation& a,
                  const char* what) {
  for (const PixelPoint p : pts) {
    if (p.x < 0 || p.y < 0 || p.x >= a.image_width || p.y >= a.image_height) {
      throw Error(ErrorCode::kInvalidArgument, a.image_id + ": " + what + " point " +
                                                   point_text(p) + " is outside the image");
    }
  }
}

// floor(num / den) for den > 0.
std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return -floor_div(-num, den); }

// x coordinate of an edge crossing as an exact fraction num / den, den > 0.
struct Crossing {
  std::int64_t num;
  std::int64_t den;
};

bool crossing_less(const Crossing& a, const Crossing& b) {
  return a.num * b.den < b.num * a.den;
}

}  // namespace

void GroundTruthAnnotation::validate() const {
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, image_id + ": image size must be positive");
  }
  if (!(pixel_spacing_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, image_id + ": pixel_spacing_mm must be > 0");
  }
  if (ett_points) check_points(*ett_points, *this, "ETT");
  if (bifurcation_points) check_points(*bifurcation_points, *this, "bifurcation");
}

std::string_view to_string(DetectionClass cls) {
  switch (cls) {
    case DetectionClass::kTube: return "tube";
    case DetectionClass::kCarina: return "carina";
    case DetectionClass::kTubeTipBox: return "tube_tip_box";
    case DetectionClass::kCarinaBox: return "carina_box";
  }
  return "unknown";
}

std::optional<DetectionClass> parse_detection_class(std::string_view name) {
  for (const DetectionClass c : kAllDetectionClasses) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_mask_class(DetectionClass cls) {
  return cls == DetectionClass::kTube || cls == DetectionClass::kCarina;
}

void ScoredDetection::validate() const {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "score must lie in [0, 1]");
  }
  if (is_mask_class(cls)) {
    if (!mask || box) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(to_string(cls)) + " detection must carry a mask and no box");
    }
  } else if (!box || mask) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(to_string(cls)) + " detection must carry a box and no mask");
  }
}

SelectedDetections select_max_score(const DetectionSet& dets) {
  SelectedDetections out;
  auto slot = [&out](DetectionClass c) -> std::optional<ScoredDetection>& {
    switch (c) {
      case DetectionClass::kTube: return out.tube;
      case DetectionClass::kCarina: return out.carina;
      case DetectionClass::kTubeTipBox: return out.tube_tip_box;
      case DetectionClass::kCarinaBox: return out.carina_box;
    }
    return out.tube;
  };
  for (const auto& d : dets.detections) {
    auto& best = slot(d.cls);
    if (!best || d.score > best->score) best = d;
  }
  return out;
}

PixelPoint derive_mp(const GroundTruthAnnotation& annotation) {
  if (!annotation.ett_points) {
    throw Error(ErrorCode::kMissingObject, annotation.image_id + ": no ETT annotation");
  }
  const PixelPoint p2 = (*annotation.ett_points)[1];
  const PixelPoint p3 = (*annotation.ett_points)[2];
  // floor((a + b + 1) / 2) is round-half-up of the midpoint.
  return {static_cast<int>(floor_div(std::int64_t{p2.x} + p3.x + 1, 2)),
          static_cast<int>(floor_div(std::int64_t{p2.y} + p3.y + 1, 2))};
}

PixelPoint carina_gt_point(const GroundTruthAnnotation& annotation) {
  if (!annotation.bifurcation_points) {
    throw Error(ErrorCode::kMissingObject, annotation.image_id + ": no bifurcation annotation");
  }
  return (*annotation.bifurcation_points)[4];
}

std::optional<FeatureBox> tip_feature_box(const GroundTruthAnnotation& annotation) {
  if (!annotation.ett_points) return std::nullopt;
  return FeatureBox{derive_mp(annotation)};
}

std::optional<FeatureBox> carina_feature_box(const GroundTruthAnnotation& annotation) {
  if (!annotation.bifurcation_points) return std::nullopt;
  return FeatureBox{carina_gt_point(annotation)};
}

long long polygon_area2(std::span<const PixelPoint> vertices) {
  long long sum = 0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PixelPoint a = vertices[i];
    const PixelPoint b = vertices[(i + 1) % n];
    sum += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return sum;
}

BinaryMask rasterize_polygon(std::span<const PixelPoint> vertices, int width, int height) {
  if (vertices.size() < 3 || polygon_area2(vertices) == 0) {
    throw Error(ErrorCode::kDegenerateAnnotation, "polygon has zero area");
  }
  BinaryMask mask(width, height);
  const std::size_t n = vertices.size();

  // Interior: scanline even-odd with half-open edge spans [ymin, ymax).
  std::vector<Crossing> crossings;
  for (int y = 0; y < height; ++y) {
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      PixelPoint a = vertices[i];
      PixelPoint b = vertices[(i + 1) % n];
      if (a.y == b.y) continue;
      if (a.y > b.y) std::swap(a, b);
      if (y < a.y || y >= b.y) continue;
      const std::int64_t den = b.y - a.y;
      crossings.push_back({std::int64_t{a.x} * den + std::int64_t{y - a.y} * (b.x - a.x), den});
    }
    std::sort(crossings.begin(), crossings.end(), crossing_less);
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const std::int64_t first = ceil_div(crossings[k].num, crossings[k].den);
      const std::int64_t last = ceil_div(crossings[k + 1].num, crossings[k + 1].den) - 1;
      const std::int64_t lo = std::max<std::int64_t>(first, 0);
      const std::int64_t hi = std::min<std::int64_t>(last, width - 1);
      for (std::int64_t x = lo; x <= hi; ++x) mask.set(static_cast<int>(x), y);
    }
  }

  // Boundary: every lattice point on each edge.
  for (std::size_t i = 0; i < n; ++i) {
    const PixelPoint a = vertices[i];
    const PixelPoint b = vertices[(i + 1) % n];
    const int dx = b.x - a.x;
    const int dy = b.y - a.y;
    const int g = std::gcd(std::abs(dx), std::abs(dy));
    if (g == 0) {
      mask.set_clipped(a.x, a.y);
      continue;
    }
    for (int t = 0; t <= g; ++t) mask.set_clipped(a.x + t * (dx / g), a.y + t * (dy / g));
  }
  return mask;
}

GroundTruthMasks gt_masks(const GroundTruthAnnotation& annotation) {
  GroundTruthMasks out;
  if (annotation.ett_points) {
    out.tube = rasterize_polygon(*annotation.ett_points, annotation.image_width,
                                 annotation.image_height);
  }
  if (annotation.bifurcation_points) {
    out.carina = rasterize_polygon(*annotation.bifurcation_points, annotation.image_width,
                                   annotation.image_height);
  }
  return out;
}

}  // namespace ettc
