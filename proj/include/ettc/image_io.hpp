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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ettc/raster.hpp"

namespace ettc {

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triplets

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {0, 0, 0});

  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  void set_clipped(int x, int y, Rgb c) {
    if (contains(x, y)) set(x, y, c);
  }
};

/// Uncompressed row-major run-length code: alternating background/foreground
/// run lengths, always starting with a (possibly zero) background run.
std::vector<std::uint32_t> encode_rle(const BinaryMask& mask);
BinaryMask decode_rle(std::span<const std::uint32_t> runs, int width, int height);

/// Any bit depth or color type is accepted; a pixel is foreground when any
/// of its 8-bit channels is nonzero.
BinaryMask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

/// Gray or color PNGs are expanded to 8-bit RGB.
RgbImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image,
                   const std::map<std::string, std::string>& text = {});
/// tEXt chunks of a PNG file.
std::map<std::string, std::string> read_png_text(const std::filesystem::path& path);

}  // namespace ettc
