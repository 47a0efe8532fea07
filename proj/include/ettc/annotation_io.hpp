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
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ettc/annotation.hpp"

namespace ettc {

// Annotation file: JSON array of
//   {image_id, image_width, image_height, pixel_spacing_mm,
//    ett_points: [[x,y] x4] | null, bifurcation_points: [[x,y] x9] | null}
//
// Detection file: JSON array of
//   {image_id, class, score, mask_png | mask_rle (+ mask_size [w,h]) | box [cx,cy,w,h]}
// mask_png paths are resolved against the detection file's directory.

std::vector<GroundTruthAnnotation> annotations_from_json(const nlohmann::json& doc,
                                                         const std::string& source);
nlohmann::json annotations_to_json(const std::vector<GroundTruthAnnotation>& annotations);
std::vector<GroundTruthAnnotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::filesystem::path& path,
                      const std::vector<GroundTruthAnnotation>& annotations);

using ImageSizes = std::map<std::string, std::pair<int, int>>;

ImageSizes image_sizes(const std::vector<GroundTruthAnnotation>& annotations);

/// Records are grouped per image_id in order of first appearance; detection
/// order within an image is preserved. `sizes` supplies dimensions for RLE
/// masks that carry no mask_size.
std::vector<DetectionSet> detections_from_json(const nlohmann::json& doc, const std::string& source,
                                               const std::filesystem::path& base_dir = {},
                                               const ImageSizes& sizes = {});
/// Masks are always written inline as RLE with mask_size.
nlohmann::json detections_to_json(const std::vector<DetectionSet>& sets);
std::vector<DetectionSet> load_detections(const std::filesystem::path& path,
                                          const ImageSizes& sizes = {});
void save_detections(const std::filesystem::path& path, const std::vector<DetectionSet>& sets);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ettc
