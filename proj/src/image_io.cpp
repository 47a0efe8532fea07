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

#include "ettc/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "ettc/error.hpp"

namespace ettc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return f;
}

std::vector<std::uint8_t> read_simplified(const std::filesystem::path& path, png_uint_32 format,
                                          int& width, int& height) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw Error(ErrorCode::kIo, path.string() + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, path.string() + ": " + message);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return buffer;
}

// Classic libpng writer; needed for tEXt chunks, which the simplified API lacks.
// Returns an error message, or an empty string on success.
std::string write_png_classic(std::FILE* file, int width, int height, int color_type,
                              const std::uint8_t* pixels, int channels, png_text* text,
                              int text_count) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return "png_create_write_struct failed";
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return "png_create_info_struct failed";
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return "libpng write error";
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (text_count > 0) png_set_text(png, info, text, text_count);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + stride * y));
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return {};
}

void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               const std::uint8_t* pixels, int channels,
               const std::map<std::string, std::string>& text) {
  std::vector<png_text> chunks;
  chunks.reserve(text.size());
  for (const auto& [key, value] : text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char*>(key.c_str());
    t.text = const_cast<char*>(value.c_str());
    t.text_length = value.size();
    chunks.push_back(t);
  }
  FilePtr file = open_file(path, "wb");
  const std::string err = write_png_classic(file.get(), width, height, color_type, pixels, channels,
                                            chunks.data(), static_cast<int>(chunks.size()));
  if (!err.empty()) throw Error(ErrorCode::kIo, path.string() + ": " + err);
  if (std::fflush(file.get()) != 0) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text_classic(std::FILE* file, std::map<std::string, std::string>& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return "png_create_read_struct failed";
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return "png_create_info_struct failed";
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return "libpng read error";
  }
  png_init_io(png, file);
  png_read_info(png, info);
  png_textp text = nullptr;
  int count = 0;
  png_get_text(png, info, &text, &count);
  for (int i = 0; i < count; ++i) out[text[i].key] = std::string(text[i].text, text[i].text_length);
  png_destroy_read_struct(&png, &info, nullptr);
  return {};
}

}  // namespace

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c[0];
  pixels[i + 1] = c[1];
  pixels[i + 2] = c[2];
}

std::vector<std::uint32_t> encode_rle(const BinaryMask& mask) {
  std::vector<std::uint32_t> runs;
  const auto data = mask.data();
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (const std::uint8_t v : data) {
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

BinaryMask decode_rle(std::span<const std::uint32_t> runs, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "RLE mask needs positive dimensions");
  }
  const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels;
  pixels.reserve(total);
  std::uint8_t value = 0;
  for (const std::uint32_t run : runs) {
    if (pixels.size() + run > total) {
      throw Error(ErrorCode::kDimensionMismatch, "RLE runs exceed " + std::to_string(total) +
                                                     " pixels");
    }
    pixels.insert(pixels.end(), run, value);
    value ^= 1;
  }
  if (pixels.size() != total) {
    throw Error(ErrorCode::kDimensionMismatch, "RLE runs cover " + std::to_string(pixels.size()) +
                                                   " of " + std::to_string(total) + " pixels");
  }
  return BinaryMask(width, height, std::move(pixels));
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  // RGB keeps dim colors nonzero; a linear gray conversion would not.
  const auto rgb = read_simplified(path, PNG_FORMAT_RGB, w, h);
  std::vector<std::uint8_t> fg(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < fg.size(); ++i) {
    fg[i] = (rgb[3 * i] | rgb[3 * i + 1] | rgb[3 * i + 2]) != 0 ? 1 : 0;
  }
  return BinaryMask(w, h, std::move(fg));
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> gray(mask.data().begin(), mask.data().end());
  for (auto& v : gray) v = v != 0 ? 255 : 0;
  write_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, gray.data(), 1, {});
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  RgbImage img;
  img.pixels = read_simplified(path, PNG_FORMAT_RGB, img.width, img.height);
  return img;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image,
                   const std::map<std::string, std::string>& text) {
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, image.pixels.data(), 3, text);
}

std::map<std::string, std::string> read_png_text(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  std::map<std::string, std::string> out;
  const std::string err = read_text_classic(file.get(), out);
  if (!err.empty()) throw Error(ErrorCode::kIo, path.string() + ": " + err);
  return out;
}

}  // namespace ettc
