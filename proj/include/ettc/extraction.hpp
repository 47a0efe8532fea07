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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ettc/annotation.hpp"
#include "ettc/raster.hpp"

namespace ettc {

enum class PointSource { kNone, kBox, kMask };

std::string_view to_string(PointSource source);
std::optional<PointSource> parse_point_source(std::string_view name);

struct ExtractionOptions {
  double fusion_threshold_px = 100.0;  // carina: mask replaces box beyond this distance
  int central_window = 15;
  int feature_window = 7;
  int patch_width = 100;
  int patch_height = 150;
  int edge_low = 50;
  int edge_high = 150;
};

struct FusedPoint {
  std::optional<PixelPoint> point;
  PointSource source = PointSource::kNone;

  friend bool operator==(const FusedPoint&, const FusedPoint&) = default;
};

struct CarinaMaskPoint {
  PixelPoint point;
  PixelPoint central;     // skeleton density peak
  bool fallback = false;  // patch had no edge pixels; point == central
};

struct ExtractionResult {
  std::string image_id;
  double pixel_spacing_mm = 0.0;

  std::optional<PixelPoint> tip_point;
  std::optional<PixelPoint> carina_point;
  PointSource tip_source = PointSource::kNone;
  PointSource carina_source = PointSource::kNone;

  std::optional<PixelPoint> tip_mask_point;
  std::optional<PixelPoint> tip_box_point;
  std::optional<PixelPoint> carina_mask_point;
  std::optional<PixelPoint> carina_box_point;
  bool carina_fallback = false;

  std::optional<double> distance_px;
  std::optional<double> distance_mm;

  friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;
};

/// Lowest pixel of the tube mask skeleton.
PixelPoint tip_from_mask(const BinaryMask& tube_mask);

/// Skeleton density peak (central window), then the densest edge neighborhood
/// (feature window) inside an edge patch centered on that peak. Density ties
/// in the patch go to the pixel nearest the peak.
CarinaMaskPoint carina_from_mask(const BinaryMask& carina_mask,
                                 const ExtractionOptions& options = {});

/// Box center rounded half up.
PixelPoint point_from_box(const BoxRegion& box);

/// Box point is always accepted; the mask point only fills in when no box.
FusedPoint fuse_tip(std::optional<PixelPoint> box_pt, std::optional<PixelPoint> mask_pt);

/// Box point unless the mask point is strictly farther than `threshold_px`
/// from it; either point fills in for the other when missing.
FusedPoint fuse_carina(std::optional<PixelPoint> box_pt, std::optional<PixelPoint> mask_pt,
                       double threshold_px = 100.0);

ExtractionResult extract(const DetectionSet& dets, double pixel_spacing_mm,
                         const ExtractionOptions& options = {});

/// Extracts every image, fanning out over `jobs` threads (0 = hardware
/// concurrency). Output order matches `sets`.
std::vector<ExtractionResult> extract_all(const std::vector<DetectionSet>& sets,
                                          const std::vector<double>& spacings,
                                          const ExtractionOptions& options, unsigned jobs);

nlohmann::json to_json(const ExtractionResult& result);
ExtractionResult extraction_from_json(const nlohmann::json& rec, const std::string& where);
nlohmann::json records_to_json(const std::vector<ExtractionResult>& results);
std::vector<ExtractionResult> records_from_json(const nlohmann::json& doc,
                                                const std::string& source);
std::vector<ExtractionResult> load_records(const std::filesystem::path& path);

}  // namespace ettc
