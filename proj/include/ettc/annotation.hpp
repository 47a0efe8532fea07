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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ettc/raster.hpp"

namespace ettc {

inline constexpr int kFeatureBoxSide = 48;
inline constexpr std::size_t kTubePointCount = 4;
inline constexpr std::size_t kBifurcationPointCount = 9;

using TubePoints = std::array<PixelPoint, kTubePointCount>;                // P1..P4
using BifurcationPoints = std::array<PixelPoint, kBifurcationPointCount>;  // P5..P13

/// Expert labels for one radiograph. A missing point list means the object is
/// absent from the image (no tube, or carina not visible).
struct GroundTruthAnnotation {
  std::string image_id;
  int image_width = 0;
  int image_height = 0;
  std::optional<TubePoints> ett_points;
  std::optional<BifurcationPoints> bifurcation_points;
  double pixel_spacing_mm = 0.0;

  /// Throws kInvalidArgument when a point is out of bounds or spacing <= 0.
  void validate() const;

  friend bool operator==(const GroundTruthAnnotation&, const GroundTruthAnnotation&) = default;
};

struct FeatureBox {
  PixelPoint center;
  int side = kFeatureBoxSide;

  friend bool operator==(const FeatureBox&, const FeatureBox&) = default;
};

/// Axis-aligned box given by real-valued center and extent, in pixels.
struct BoxRegion {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const BoxRegion&, const BoxRegion&) = default;
};

enum class DetectionClass { kTube, kCarina, kTubeTipBox, kCarinaBox };

inline constexpr std::array<DetectionClass, 4> kAllDetectionClasses = {
    DetectionClass::kTube, DetectionClass::kCarina, DetectionClass::kTubeTipBox,
    DetectionClass::kCarinaBox};

std::string_view to_string(DetectionClass cls);
std::optional<DetectionClass> parse_detection_class(std::string_view name);
bool is_mask_class(DetectionClass cls);

struct ScoredDetection {
  DetectionClass cls = DetectionClass::kTube;
  double score = 0.0;
  std::optional<BinaryMask> mask;  // tube / carina only
  std::optional<BoxRegion> box;    // *_box classes only

  /// Throws kInvalidArgument if the payload does not match the class or the
  /// score is outside [0, 1].
  void validate() const;

  friend bool operator==(const ScoredDetection&, const ScoredDetection&) = default;
};

struct DetectionSet {
  std::string image_id;
  std::vector<ScoredDetection> detections;

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

struct SelectedDetections {
  std::optional<ScoredDetection> tube;
  std::optional<ScoredDetection> carina;
  std::optional<ScoredDetection> tube_tip_box;
  std::optional<ScoredDetection> carina_box;
};

/// Highest-scoring detection per class; the first one listed wins ties.
SelectedDetections select_max_score(const DetectionSet& dets);

/// Tube tip label: midpoint of P2 and P3, rounded half up per coordinate.
PixelPoint derive_mp(const GroundTruthAnnotation& annotation);

/// Carina label: P9, the fifth bifurcation point.
PixelPoint carina_gt_point(const GroundTruthAnnotation& annotation);

/// 48x48 boxes centered on the tip and carina labels, where present.
std::optional<FeatureBox> tip_feature_box(const GroundTruthAnnotation& annotation);
std::optional<FeatureBox> carina_feature_box(const GroundTruthAnnotation& annotation);

/// Twice the signed shoelace area.
long long polygon_area2(std::span<const PixelPoint> vertices);

/// Closed-polygon fill with the even-odd rule; a pixel is set when its center
/// lies inside the polygon or exactly on an edge. Pixels outside the raster
/// are clipped. Zero-area polygons throw kDegenerateAnnotation.
BinaryMask rasterize_polygon(std::span<const PixelPoint> vertices, int width, int height);

struct GroundTruthMasks {
  std::optional<BinaryMask> tube;
  std::optional<BinaryMask> carina;
};

/// Rasterized P1..P4 and P5..P13 polygons for the objects that are labeled.
GroundTruthMasks gt_masks(const GroundTruthAnnotation& annotation);

}  // namespace ettc
