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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ettc {

/// Integer pixel coordinate. Origin is the top-left corner; y grows downward,
/// so the "lowest" point of a shape is the one with the largest y.
struct PixelPoint {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
  friend auto operator<=>(const PixelPoint&, const PixelPoint&) = default;
};

double euclidean(PixelPoint a, PixelPoint b);
std::int64_t squared_distance(PixelPoint a, PixelPoint b);

/// Row-major boolean raster. Pixels are stored as 0/1 bytes.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  BinaryMask(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(PixelPoint p) const noexcept { return contains(p.x, p.y); }

  bool at(int x, int y) const { return pixels_[index(x, y)] != 0; }
  bool at(PixelPoint p) const { return at(p.x, p.y); }
  /// Out-of-bounds reads return background.
  bool get(int x, int y) const noexcept { return contains(x, y) && pixels_[index(x, y)] != 0; }

  void set(int x, int y, bool value = true) { pixels_[index(x, y)] = value ? 1 : 0; }
  void set(PixelPoint p, bool value = true) { set(p.x, p.y, value); }
  /// Writes only when (x, y) lies inside the raster.
  void set_clipped(int x, int y, bool value = true) {
    if (contains(x, y)) set(x, y, value);
  }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  std::vector<PixelPoint> foreground() const;

  std::span<const std::uint8_t> data() const noexcept { return pixels_; }

  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  /// Copy shifted by (dx, dy); pixels leaving the raster are dropped.
  BinaryMask translated(int dx, int dy) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Sliding-window extent. Both sides must be odd so the window has a center.
class WindowSpec {
 public:
  WindowSpec(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int half_width() const noexcept { return width_ / 2; }
  int half_height() const noexcept { return height_ / 2; }

 private:
  int width_;
  int height_;
};

struct Patch {
  BinaryMask mask;
  PixelPoint offset;  // top-left corner of the patch in image coordinates
};

/// Zhang-Suen thinning to convergence, then a second run whose candidates may
/// have up to seven neighbors as long as the neighbor ring stays connected;
/// that run clears the solid blocks the classic rule leaves around holes.
/// Deletions found by each parallel sub-iteration are applied sequentially and
/// re-checked against the current raster, which keeps 8-connected components
/// (including 2x2 blocks and 2-px diagonals) intact.
BinaryMask skeletonize(const BinaryMask& mask);

/// Edge map of a binary mask rendered at 0/255. Edge strength of a foreground
/// pixel is its largest intensity step to an 8-neighbor (outside the raster
/// counts as 0); strong pixels (>= high) seed a hysteresis pass over weak
/// pixels (>= low). On binary input this is exactly the inner 8-boundary.
BinaryMask edge_pixels(const BinaryMask& mask, int low_threshold = 50, int high_threshold = 150);

/// Candidate pixel whose clipped window holds the most `weights` foreground.
/// Ties go to the smallest y, then smallest x.
PixelPoint densest_window_center(const BinaryMask& candidates, const BinaryMask& weights,
                                 WindowSpec window);

/// As above, but ties are broken by squared distance to `tie_reference` first.
PixelPoint densest_window_center(const BinaryMask& candidates, const BinaryMask& weights,
                                 WindowSpec window, PixelPoint tie_reference);

/// Per-pixel count of `weights` foreground inside the clipped window; the
/// raster of counts shares the dimensions of `weights`.
std::vector<int> window_counts(const BinaryMask& weights, WindowSpec window);

/// patch_w x patch_h sub-raster centered on `center`, shifted to stay inside
/// the image. A patch larger than the image is reduced to the image extent.
Patch crop_patch(const BinaryMask& mask, PixelPoint center, int patch_w, int patch_h);

/// Foreground pixel with the largest y; ties go to the smallest x.
PixelPoint lowest_skeleton_point(const BinaryMask& skeleton);

/// Number of 8-connected foreground components.
int count_components(const BinaryMask& mask);

}  // namespace ettc
