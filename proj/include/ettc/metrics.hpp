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
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ettc/annotation.hpp"
#include "ettc/extraction.hpp"
#include "ettc/raster.hpp"
#include "ettc/stats.hpp"

namespace ettc {

/// 2|A and B| / (|A| + |B|). Throws kDimensionMismatch, or kUndefined when
/// both masks are empty.
double dice(const BinaryMask& a, const BinaryMask& b);

struct ObjectError {
  double px = 0.0;
  double mm = 0.0;
};

ObjectError object_error(PixelPoint gt_pt, PixelPoint pred_pt, double pixel_spacing_mm);

/// A detection succeeds when Dice >= min_dice or the point error <= max_error_px.
struct DetectionCriteria {
  double min_dice = 0.6;
  double max_error_px = 100.0;
};

struct MatchFlags {
  bool tp = false;
  bool fp = false;
  bool fn = false;

  friend bool operator==(const MatchFlags&, const MatchFlags&) = default;
};

/// TP iff both present and the criterion holds; FP iff predicted and not TP;
/// FN iff labeled and not TP. A missing measurement fails its half of the
/// criterion.
MatchFlags classify_detection(std::optional<double> dice_value, std::optional<double> error_px,
                              bool gt_present, bool pred_present,
                              const DetectionCriteria& criteria = {});

double recall(std::size_t tp, std::size_t fn);
double precision(std::size_t tp, std::size_t fp);

struct RecallPrecision {
  std::optional<double> recall;     // absent when tp + fn == 0
  std::optional<double> precision;  // absent when tp + fp == 0
};

RecallPrecision recall_precision(std::size_t tp, std::size_t fn, std::size_t fp);

double distance_error(double d1_mm, double d2_mm);

enum class Suitability { kSuitable, kUnsuitable, kUndetection };

std::string_view to_string(Suitability s);

/// Inclusive placement range for the tip-carina distance, in mm.
struct SuitableRange {
  double low_mm = 20.0;
  double high_mm = 70.0;
};

Suitability suitability(std::optional<double> distance_mm, const SuitableRange& range = {});

inline const std::vector<double> kDefaultBucketsMm = {5.0, 10.0, 15.0, 20.0};

/// Fraction of errors <= each threshold. Throws kUndefined on an empty list.
std::vector<double> bucket_distribution(std::span<const double> errors_mm,
                                        std::span<const double> thresholds_mm = kDefaultBucketsMm);

// ---------------------------------------------------------------------------
// Dataset evaluation

struct PredictedMasks {
  std::optional<BinaryMask> tube;
  std::optional<BinaryMask> carina;
};

struct ObjectOutcome {
  bool gt_present = false;
  bool pred_present = false;
  std::optional<double> dice;
  std::optional<double> error_px;
  std::optional<double> error_mm;
  MatchFlags flags;
};

struct ImageEvaluation {
  std::string image_id;
  ObjectOutcome tip;
  ObjectOutcome carina;
  std::optional<double> d1_mm;  // ground truth MP to P9
  std::optional<double> d2_mm;  // predicted tip to predicted carina
  std::optional<double> distance_error_mm;
  std::optional<Suitability> gt_suitability;  // absent when d1 is unknown
  Suitability pred_suitability = Suitability::kUndetection;
};

struct ErrorSummary {
  std::size_t n = 0;
  std::optional<double> mean_mm;
  std::optional<double> std_mm;
  std::optional<std::vector<double>> buckets;
};

struct ClassSummary {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  RecallPrecision rates;
  ErrorSummary error;
};

/// Rows: predicted suitable / unsuitable / undetection. Columns: ground truth
/// suitable / unsuitable. Images whose ground-truth distance is unknown are
/// tallied separately.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 3> cells{};
  std::size_t without_gt_distance = 0;

  std::size_t total() const;
};

struct PearsonSummary {
  std::optional<PearsonStats> stats;
  std::string unavailable_reason;
  std::size_t n_pairs = 0;
  std::size_t n_total = 0;
};

struct EvaluationReport {
  std::vector<ImageEvaluation> images;  // sorted by image_id
  ClassSummary tip;
  ClassSummary carina;
  ErrorSummary distance;
  ConfusionMatrix confusion;
  PearsonSummary pearson;
  std::vector<double> bucket_thresholds_mm;
};

struct EvaluationOptions {
  DetectionCriteria criteria;
  SuitableRange range;
  std::vector<double> bucket_thresholds_mm = kDefaultBucketsMm;
  unsigned jobs = 1;
};

/// Aligns ground truth and results by image_id (kUnmatchedImages names every
/// id present on only one side) and aggregates in image_id order. Masks are
/// optional; without a predicted mask Dice is not measured.
EvaluationReport evaluate(const std::vector<GroundTruthAnnotation>& gt,
                          const std::vector<ExtractionResult>& results,
                          const std::map<std::string, PredictedMasks>& masks = {},
                          const EvaluationOptions& options = {});

/// Max-score tube and carina masks of each detection set.
std::map<std::string, PredictedMasks> predicted_masks(const std::vector<DetectionSet>& sets);

}  // namespace ettc
