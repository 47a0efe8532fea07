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

#include "ettc/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ettc/error.hpp"

namespace ettc {

namespace {

void require_nonempty(const BinaryMask& mask, const char* what) {
  if (mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, std::string(what) + " has no foreground pixels");
  }
}

// Clockwise from north: P2..P9 in Zhang-Suen numbering.
constexpr std::array<int, 8> kRingDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kRingDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> ring(const BinaryMask& m, int x, int y) {
  std::array<int, 8> n{};
  for (int k = 0; k < 8; ++k) n[k] = m.get(x + kRingDx[k], y + kRingDy[k]) ? 1 : 0;
  return n;
}

// True when the foreground ring pixels form one 8-connected group without
// the center. Deleting such a pixel never splits a foreground component; it
// may open a background hole, which thinning does not need to preserve.
bool ring_connected(const std::array<int, 8>& n) {
  int seen = 0;
  int groups = 0;
  for (int start = 0; start < 8; ++start) {
    if (n[start] == 0 || (seen >> start & 1) != 0) continue;
    ++groups;
    int stack[8];
    int top = 0;
    stack[top++] = start;
    seen |= 1 << start;
    while (top > 0) {
      const int k = stack[--top];
      // Ring neighbors are adjacent; edge-adjacent (even) positions also
      // touch the next edge-adjacent position diagonally.
      int next[4] = {(k + 1) % 8, (k + 7) % 8, -1, -1};
      if (k % 2 == 0) {
        next[2] = (k + 2) % 8;
        next[3] = (k + 6) % 8;
      }
      for (const int j : next) {
        if (j >= 0 && n[j] != 0 && (seen >> j & 1) == 0) {
          seen |= 1 << j;
          stack[top++] = j;
        }
      }
    }
  }
  return groups == 1;
}

int neighbour_count(const std::array<int, 8>& n) {
  int c = 0;
  for (const int v : n) c += v;
  return c;
}

// Yokoi connectivity number for 8-connected foreground. A foreground pixel
// is simple (deletable without changing topology) iff this equals 1.
int yokoi8(const std::array<int, 8>& n) {
  // Yokoi orders neighbors E, NE, N, NW, W, SW, S, SE; map from the ring.
  const std::array<int, 8> order = {2, 1, 0, 7, 6, 5, 4, 3};
  std::array<int, 9> inv{};
  for (int k = 0; k < 8; ++k) inv[k] = 1 - n[order[k]];
  inv[8] = inv[0];
  int sum = 0;
  for (int k = 0; k < 8; k += 2) {
    const int k1 = k + 1;
    const int k2 = (k + 2) % 8;
    sum += inv[k] - inv[k] * inv[k1] * inv[k2];
  }
  return sum;
}

bool directional(const std::array<int, 8>& n, int pass) {
  const int p2 = n[0], p4 = n[2], p6 = n[4], p8 = n[6];
  if (pass == 0) return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
  return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

int transitions(const std::array<int, 8>& n) {
  int t = 0;
  for (int k = 0; k < 8; ++k) t += (n[k] == 0 && n[(k + 1) % 8] == 1) ? 1 : 0;
  return t;
}

enum class Phase { kClassic, kRelaxed };

// Classic: the Zhang-Suen test, deletions re-checked as simple points.
// Relaxed: the crossing-number condition becomes ring connectivity and up to
// seven neighbors are allowed (but at least three, so staircase corners
// stay put), which clears full 3x3 blocks that classic
// passes leave wedged between single-pixel holes.
bool candidate(const std::array<int, 8>& n, int pass, Phase phase) {
  const int b = neighbour_count(n);
  if (phase == Phase::kClassic) {
    return b >= 2 && b <= 6 && transitions(n) == 1 && directional(n, pass);
  }
  return b >= 3 && b <= 7 && ring_connected(n) && directional(n, pass);
}

bool deletable(const std::array<int, 8>& n, Phase phase) {
  const int b = neighbour_count(n);
  if (phase == Phase::kClassic) return b >= 2 && yokoi8(n) == 1;
  return b >= 3 && ring_connected(n);
}

bool thinning_pass(BinaryMask& m, int pass, Phase phase) {
  std::vector<PixelPoint> marked;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.at(x, y) && candidate(ring(m, x, y), pass, phase)) marked.push_back({x, y});
    }
  }
  bool changed = false;
  for (const PixelPoint p : marked) {
    if (deletable(ring(m, p.x, p.y), phase)) {
      m.set(p, false);
      changed = true;
    }
  }
  return changed;
}

}  // namespace

double euclidean(PixelPoint a, PixelPoint b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

std::int64_t squared_distance(PixelPoint a, PixelPoint b) {
  const std::int64_t dx = a.x - b.x;
  const std::int64_t dy = a.y - b.y;
  return dx * dx + dy * dy;
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be non-negative");
  }
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kDimensionMismatch, "pixel count does not match width x height");
  }
  for (auto& v : pixels_) v = v != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
}

std::vector<PixelPoint> BinaryMask::foreground() const {
  std::vector<PixelPoint> out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

BinaryMask BinaryMask::translated(int dx, int dy) const {
  BinaryMask out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at(x, y)) out.set_clipped(x + dx, y + dy);
    }
  }
  return out;
}

WindowSpec::WindowSpec(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0 || width % 2 == 0 || height % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "window sides must be positive and odd, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

BinaryMask skeletonize(const BinaryMask& mask) {
  require_nonempty(mask, "skeletonize input");
  BinaryMask out = mask;
  for (const Phase phase : {Phase::kClassic, Phase::kRelaxed}) {
    bool changed = true;
    while (changed) {
      changed = thinning_pass(out, 0, phase);
      changed = thinning_pass(out, 1, phase) || changed;
    }
  }
  return out;
}

BinaryMask edge_pixels(const BinaryMask& mask, int low_threshold, int high_threshold) {
  require_nonempty(mask, "edge input");
  if (low_threshold <= 0 || high_threshold > 255 || low_threshold >= high_threshold) {
    throw Error(ErrorCode::kInvalidArgument, "edge thresholds must satisfy 0 < low < high <= 255");
  }
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> strength(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int best = 0;
      for (int k = 0; k < 8; ++k) {
        const int v = mask.get(x + kRingDx[k], y + kRingDy[k]) ? 255 : 0;
        best = std::max(best, 255 - v);
      }
      strength[static_cast<std::size_t>(y) * w + x] = best;
    }
  }

  BinaryMask edges(w, h);
  std::vector<PixelPoint> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (strength[static_cast<std::size_t>(y) * w + x] >= high_threshold) {
        edges.set(x, y);
        stack.push_back({x, y});
      }
    }
  }
  while (!stack.empty()) {
    const PixelPoint p = stack.back();
    stack.pop_back();
    for (int k = 0; k < 8; ++k) {
      const int nx = p.x + kRingDx[k];
      const int ny = p.y + kRingDy[k];
      if (!edges.contains(nx, ny) || edges.at(nx, ny)) continue;
      if (strength[static_cast<std::size_t>(ny) * w + nx] >= low_threshold) {
        edges.set(nx, ny);
        stack.push_back({nx, ny});
      }
    }
  }
  return edges;
}

std::vector<int> window_counts(const BinaryMask& weights, WindowSpec window) {
  const int w = weights.width();
  const int h = weights.height();
  // Summed-area table with a zero guard row/column.
  std::vector<int> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto s = [&](int x, int y) -> int& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    int row = 0;
    for (int x = 0; x < w; ++x) {
      row += weights.at(x, y) ? 1 : 0;
      s(x + 1, y + 1) = s(x + 1, y) + row;
    }
  }
  std::vector<int> counts(weights.size(), 0);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - window.half_height());
    const int y1 = std::min(h, y + window.half_height() + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - window.half_width());
      const int x1 = std::min(w, x + window.half_width() + 1);
      counts[static_cast<std::size_t>(y) * w + x] = s(x1, y1) - s(x0, y1) - s(x1, y0) + s(x0, y0);
    }
  }
  return counts;
}

namespace {

template <typename Better>
PixelPoint densest_impl(const BinaryMask& candidates, const BinaryMask& weights,
                        WindowSpec window, Better better) {
  require_nonempty(candidates, "window candidates");
  if (!candidates.same_shape(weights)) {
    throw Error(ErrorCode::kDimensionMismatch, "candidate and weight masks differ in size");
  }
  const auto counts = window_counts(weights, window);
  std::optional<PixelPoint> best;
  int best_count = -1;
  for (int y = 0; y < candidates.height(); ++y) {
    for (int x = 0; x < candidates.width(); ++x) {
      if (!candidates.at(x, y)) continue;
      const int c = counts[static_cast<std::size_t>(y) * candidates.width() + x];
      const PixelPoint p{x, y};
      if (c > best_count || (c == best_count && better(p, *best))) {
        best = p;
        best_count = c;
      }
    }
  }
  return *best;
}

}  // namespace

PixelPoint densest_window_center(const BinaryMask& candidates, const BinaryMask& weights,
                                 WindowSpec window) {
  // Raster order already visits smaller y, then smaller x, first.
  return densest_impl(candidates, weights, window, [](PixelPoint, PixelPoint) { return false; });
}

PixelPoint densest_window_center(const BinaryMask& candidates, const BinaryMask& weights,
                                 WindowSpec window, PixelPoint tie_reference) {
  return densest_impl(candidates, weights, window, [&](PixelPoint p, PixelPoint incumbent) {
    return squared_distance(p, tie_reference) < squared_distance(incumbent, tie_reference);
  });
}

Patch crop_patch(const BinaryMask& mask, PixelPoint center, int patch_w, int patch_h) {
  if (!mask.contains(center)) {
    throw Error(ErrorCode::kInvalidArgument, "patch center lies outside the image");
  }
  if (patch_w <= 0 || patch_h <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "patch size must be positive");
  }
  const int w = std::min(patch_w, mask.width());
  const int h = std::min(patch_h, mask.height());
  const int ox = std::clamp(center.x - w / 2, 0, mask.width() - w);
  const int oy = std::clamp(center.y - h / 2, 0, mask.height() - h);
  BinaryMask patch(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(ox + x, oy + y)) patch.set(x, y);
    }
  }
  return {std::move(patch), {ox, oy}};
}

PixelPoint lowest_skeleton_point(const BinaryMask& skeleton) {
  require_nonempty(skeleton, "skeleton");
  for (int y = skeleton.height() - 1; y >= 0; --y) {
    for (int x = 0; x < skeleton.width(); ++x) {
      if (skeleton.at(x, y)) return {x, y};
    }
  }
  return {};  // unreachable: mask is nonempty
}

int count_components(const BinaryMask& mask) {
  BinaryMask seen(mask.width(), mask.height());
  std::vector<PixelPoint> stack;
  int components = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y) || seen.at(x, y)) continue;
      ++components;
      seen.set(x, y);
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelPoint p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kRingDx[k];
          const int ny = p.y + kRingDy[k];
          if (mask.get(nx, ny) && !seen.at(nx, ny)) {
            seen.set(nx, ny);
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return components;
}

}  // namespace ettc
