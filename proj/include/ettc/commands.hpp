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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ettc/metrics.hpp"

namespace ettc {

enum class Command { kExtract, kEvaluate, kGenFixtures, kRender };

std::string_view to_string(Command command);

struct RunConfig {
  Command command = Command::kExtract;
  std::filesystem::path detections;
  std::filesystem::path annotations;
  std::filesystem::path records;      // extraction records (evaluate, render)
  std::filesystem::path backgrounds;  // render: <dir>/<image_id>.png when present
  std::filesystem::path out = ".";
  std::optional<double> pixel_spacing_mm;  // replaces every annotated spacing
  double fusion_threshold_px = 100.0;
  SuitableRange range;
  unsigned jobs = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  std::size_t count = 20;
  std::size_t undetected_every = 0;
  std::size_t outlier_every = 0;

  /// Throws kInvalidArgument on non-positive thresholds or an empty range.
  void validate() const;
};

inline constexpr const char* kExtractionFile = "extraction.json";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportTextFile = "report.txt";
inline constexpr const char* kPerImageCsvFile = "per_image.csv";
inline constexpr const char* kAnnotationsFile = "annotations.json";
inline constexpr const char* kDetectionsFile = "detections.json";
inline constexpr const char* kManifestFile = "manifest.json";

/// Writes <out>/extraction.json with one record per annotated image, sorted
/// by image_id. A detection for an image with no annotation is an error.
void run_extract(const RunConfig& config);
/// Writes report.json, report.txt and per_image.csv. Extraction records come
/// from --records, or are computed from --detections when no records are
/// given; detections additionally enable Dice.
void run_evaluate(const RunConfig& config);
/// Writes annotations.json, detections.json and manifest.json.
void run_gen_fixtures(const RunConfig& config);
/// Writes <out>/<image_id>.png per annotated image.
void run_render(const RunConfig& config);

void run(const RunConfig& config);

}  // namespace ettc
