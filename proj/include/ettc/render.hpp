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

#include <map>
#include <span>
#include <string>

#include "ettc/annotation.hpp"
#include "ettc/extraction.hpp"
#include "ettc/image_io.hpp"

namespace ettc {

inline constexpr Rgb kGroundTruthColor{255, 255, 0};
inline constexpr Rgb kPredictionColor{255, 0, 0};
inline constexpr Rgb kSilhouetteColor{96, 96, 96};
inline constexpr int kGlyphRadius = 4;

/// Bresenham segment, clipped to the image.
void draw_line(RgbImage& image, PixelPoint a, PixelPoint b, Rgb color);
/// Closed outline through `vertices`.
void draw_polygon_outline(RgbImage& image, std::span<const PixelPoint> vertices, Rgb color);
/// Eight-armed star: horizontal, vertical and both diagonals through `center`.
void draw_asterisk(RgbImage& image, PixelPoint center, Rgb color, int radius = kGlyphRadius);

struct Overlay {
  RgbImage image;
  std::map<std::string, std::string> legend;  // stored as PNG text chunks
};

/// Layers, bottom to top: background (or the ground-truth mask silhouette on
/// black), yellow label outlines, yellow label points, red predicted points.
/// `result` may be null for a label-only render.
Overlay render_overlay(const GroundTruthAnnotation& gt, const ExtractionResult* result,
                       const RgbImage* background = nullptr);

}  // namespace ettc
