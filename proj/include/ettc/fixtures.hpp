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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ettc/annotation.hpp"
#include "ettc/extraction.hpp"

namespace ettc::fixtures {

/// Distal tube segment: a straight strip ending at `tip`, running back along
/// -direction for `end_length` pixels, 2 * half_width + 1 pixels wide.
struct TubeGeometry {
  PixelPoint tip;
  PixelPoint direction{0, 1};  // pointing toward the tip, need not be unit
  int half_width = 1;
  int end_length = 40;
};

/// Inverted-Y airway. The trachea runs straight up from the bronchial split
/// and tapers to a point; each bronchus leaves at dx/dy = 1/2 and ends in a
/// 45-degree point. Just below the apex the two inner walls run at 45 degrees
/// for `notch_depth` rows.
struct BifurcationGeometry {
  PixelPoint apex;
  int trachea_half_width = 12;
  int trachea_length = 90;  // apex row to the start of the top taper
  int bronchus_length = 100;  // apex row to the bronchus end row
  int notch_depth = 4;
};

struct Perturbation {
  PixelPoint tip_shift;           // moves tube mask and tip box together
  PixelPoint carina_shift;        // moves carina mask and carina box together
  PixelPoint tip_box_offset;      // box-only extra offset
  PixelPoint carina_box_offset;   // box-only extra offset
  double tube_score = 0.95;
  double carina_score = 0.94;
  double tip_box_score = 0.9;
  double carina_box_score = 0.9;
  bool omit_tube_mask = false;
  bool omit_tip_box = false;
  bool omit_carina_mask = false;
  bool omit_carina_box = false;
  bool add_distractors = true;  // extra lower-score detections of every class
};

struct FixtureSpec {
  std::uint64_t seed = 0;
  std::string image_id = "fixture";
  int width = 512;
  int height = 640;
  TubeGeometry tube;
  BifurcationGeometry bifurcation;
  Perturbation perturbation;
  double pixel_spacing_mm = 0.5;

  /// Throws kInvalidSpec when geometry leaves the image or widths are < 1.
  void validate() const;
};

/// Where the pipeline must land: the expected fused point per object, the
/// source the fusion rules must pick, and an acceptance radius in pixels.
struct ExpectedEnvelope {
  std::optional<PixelPoint> tip;
  std::optional<PixelPoint> carina;
  PointSource tip_source = PointSource::kNone;
  PointSource carina_source = PointSource::kNone;
  double tip_radius_px = 0.0;
  double carina_radius_px = 0.0;
  /// Nominal mask-route points (true landmark moved by the mask shift).
  std::optional<PixelPoint> tip_mask_nominal;
  std::optional<PixelPoint> carina_mask_nominal;
};

/// Skeleton quantization envelope for mask-derived points.
inline constexpr double kMaskQuantizationPx = 2.0;

struct Fixture {
  GroundTruthAnnotation annotation;
  DetectionSet detections;
  ExpectedEnvelope expected;
  BinaryMask tube_mask;    // unshifted true tube end
  BinaryMask carina_mask;  // unshifted true airway outline
};

/// Airway outline polygon (14 vertices) for the true carina mask.
std::vector<PixelPoint> bifurcation_outline(const BifurcationGeometry& g);
/// P5..P13 labels on that outline; P9 is the apex.
BifurcationPoints bifurcation_labels(const BifurcationGeometry& g);
/// P1..P4 of the distal tube segment; the P2/P3 midpoint is the tip.
TubePoints tube_labels(const TubeGeometry& g);

Fixture generate(const FixtureSpec& spec);

/// Random but valid geometry for `seed` (vertical-ish tube above the carina).
FixtureSpec random_spec(std::uint64_t seed, const std::string& image_id);

struct ErrorProfile {
  std::vector<double> tip_errors_mm = {0.0, 3.0, 8.0, 13.0, 22.0};  // cycled per image
  std::vector<double> carina_errors_mm = {0.0};                     // cycled per image
  std::vector<double> pixel_spacings_mm = {0.5, 0.25};              // cycled per image
  std::size_t undetected_every = 0;  // every k-th image loses its carina (0 = never)
  std::size_t outlier_every = 0;     // every k-th image gets a far-off tube (0 = never)
  int outlier_shift_px = 130;
};

struct ManifestEntry {
  std::string image_id;
  double pixel_spacing_mm = 0.0;
  PixelPoint gt_tip;
  PixelPoint gt_carina;
  std::optional<PixelPoint> pred_tip;
  std::optional<PixelPoint> pred_carina;
  bool outlier = false;
  bool undetected = false;
  double planted_tip_error_mm = 0.0;
  std::optional<double> planted_carina_error_mm;
  double d1_mm = 0.0;
  std::optional<double> d2_mm;
  std::optional<double> planted_distance_error_mm;
};

struct Cohort {
  std::vector<GroundTruthAnnotation> annotations;
  std::vector<DetectionSet> detections;
  std::vector<ManifestEntry> manifest;
  std::uint64_t seed = 0;
};

/// n fixtures with planted, exactly representable errors: every displacement
/// is vertical and a whole number of pixels, and spacings are dyadic, so
/// distances and errors in mm carry no rounding.
Cohort generate_cohort(std::size_t n, std::uint64_t seed, const ErrorProfile& profile = {});

nlohmann::json manifest_to_json(const Cohort& cohort);
std::vector<ManifestEntry> manifest_from_json(const nlohmann::json& doc);

/// 64-bit mix used to derive independent per-fixture seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ettc::fixtures
