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

#include "ettc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ettc/error.hpp"
#include "ettc/parallel.hpp"

namespace ettc {

double dice(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kDimensionMismatch, "Dice masks differ in size");
  const auto da = a.data();
  const auto db = b.data();
  std::size_t inter = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    inter += static_cast<std::size_t>(da[i] & db[i]);
    total += static_cast<std::size_t>(da[i]) + db[i];
  }
  if (total == 0) throw Error(ErrorCode::kUndefined, "Dice is undefined for two empty masks");
  return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

ObjectError object_error(PixelPoint gt_pt, PixelPoint pred_pt, double pixel_spacing_mm) {
  if (!(pixel_spacing_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel spacing must be > 0");
  }
  const double px = euclidean(gt_pt, pred_pt);
  return {px, px * pixel_spacing_mm};
}

MatchFlags classify_detection(std::optional<double> dice_value, std::optional<double> error_px,
                              bool gt_present, bool pred_present,
                              const DetectionCriteria& criteria) {
  if ((dice_value || error_px) && !(gt_present && pred_present)) {
    throw Error(ErrorCode::kInvalidArgument,
                "Dice and point error exist only when both label and prediction do");
  }
  MatchFlags f;
  const bool passes = (dice_value && *dice_value >= criteria.min_dice) ||
                      (error_px && *error_px <= criteria.max_error_px);
  f.tp = gt_present && pred_present && passes;
  f.fp = pred_present && !f.tp;
  f.fn = gt_present && !f.tp;
  return f;
}

double recall(std::size_t tp, std::size_t fn) {
  if (tp + fn == 0) throw Error(ErrorCode::kUndefined, "recall needs TP + FN > 0");
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double precision(std::size_t tp, std::size_t fp) {
  if (tp + fp == 0) throw Error(ErrorCode::kUndefined, "precision needs TP + FP > 0");
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

RecallPrecision recall_precision(std::size_t tp, std::size_t fn, std::size_t fp) {
  RecallPrecision out;
  if (tp + fn > 0) out.recall = recall(tp, fn);
  if (tp + fp > 0) out.precision = precision(tp, fp);
  return out;
}

double distance_error(double d1_mm, double d2_mm) { return std::fabs(d1_mm - d2_mm); }

std::string_view to_string(Suitability s) {
  switch (s) {
    case Suitability::kSuitable: return "suitable";
    case Suitability::kUnsuitable: return "unsuitable";
    case Suitability::kUndetection: return "undetection";
  }
  return "undetection";
}

Suitability suitability(std::optional<double> distance_mm, const SuitableRange& range) {
  if (!distance_mm) return Suitability::kUndetection;
  if (*distance_mm >= range.low_mm && *distance_mm <= range.high_mm) return Suitability::kSuitable;
  return Suitability::kUnsuitable;
}

std::vector<double> bucket_distribution(std::span<const double> errors_mm,
                                        std::span<const double> thresholds_mm) {
  if (errors_mm.empty()) {
    throw Error(ErrorCode::kUndefined, "bucket distribution of an empty error list");
  }
  std::vector<double> out;
  out.reserve(thresholds_mm.size());
  for (const double t : thresholds_mm) {
    const auto hits = std::count_if(errors_mm.begin(), errors_mm.end(),
                                    [t](double e) { return e <= t; });
    out.push_back(static_cast<double>(hits) / static_cast<double>(errors_mm.size()));
  }
  return out;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = without_gt_distance;
  for (const auto& row : cells) sum += row[0] + row[1];
  return sum;
}

namespace {

ObjectOutcome score_object(std::optional<PixelPoint> gt_pt, const std::optional<BinaryMask>& gt_mask,
                           std::optional<PixelPoint> pred_pt,
                           const std::optional<BinaryMask>& pred_mask, double spacing,
                           const DetectionCriteria& criteria) {
  ObjectOutcome o;
  o.gt_present = gt_pt.has_value();
  o.pred_present = pred_pt.has_value();
  if (o.gt_present && o.pred_present) {
    const ObjectError e = object_error(*gt_pt, *pred_pt, spacing);
    o.error_px = e.px;
    o.error_mm = e.mm;
    if (gt_mask && pred_mask) {
      if (!gt_mask->same_shape(*pred_mask)) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "predicted mask size differs from the annotated image size");
      }
      o.dice = dice(*gt_mask, *pred_mask);
    }
  }
  o.flags = classify_detection(o.dice, o.error_px, o.gt_present, o.pred_present, criteria);
  return o;
}

ImageEvaluation evaluate_image(const GroundTruthAnnotation& gt, const ExtractionResult& r,
                               const PredictedMasks* masks, const EvaluationOptions& options) {
  ImageEvaluation ev;
  ev.image_id = gt.image_id;
  std::optional<PixelPoint> mp;
  std::optional<PixelPoint> p9;
  if (gt.ett_points) mp = derive_mp(gt);
  if (gt.bifurcation_points) p9 = carina_gt_point(gt);
  GroundTruthMasks gm;
  if (masks != nullptr) gm = gt_masks(gt);
  static const std::optional<BinaryMask> kNoMask;
  ev.tip = score_object(mp, gm.tube, r.tip_point, masks ? masks->tube : kNoMask,
                        gt.pixel_spacing_mm, options.criteria);
  ev.carina = score_object(p9, gm.carina, r.carina_point, masks ? masks->carina : kNoMask,
                           gt.pixel_spacing_mm, options.criteria);
  if (mp && p9) ev.d1_mm = euclidean(*mp, *p9) * gt.pixel_spacing_mm;
  ev.d2_mm = r.distance_mm;
  if (ev.d1_mm && ev.d2_mm) ev.distance_error_mm = distance_error(*ev.d1_mm, *ev.d2_mm);
  if (ev.d1_mm) ev.gt_suitability = suitability(ev.d1_mm, options.range);
  ev.pred_suitability = suitability(ev.d2_mm, options.range);
  return ev;
}

ErrorSummary summarize(const std::vector<double>& errors, std::span<const double> thresholds) {
  ErrorSummary s;
  s.n = errors.size();
  s.mean_mm = mean(errors);
  s.std_mm = sample_std(errors);
  if (!errors.empty()) s.buckets = bucket_distribution(errors, thresholds);
  return s;
}

void tally(ClassSummary& c, const ObjectOutcome& o, std::vector<double>& errors) {
  c.tp += o.flags.tp ? 1 : 0;
  c.fp += o.flags.fp ? 1 : 0;
  c.fn += o.flags.fn ? 1 : 0;
  if (o.error_mm) errors.push_back(*o.error_mm);
}

}  // namespace

EvaluationReport evaluate(const std::vector<GroundTruthAnnotation>& gt,
                          const std::vector<ExtractionResult>& results,
                          const std::map<std::string, PredictedMasks>& masks,
                          const EvaluationOptions& options) {
  std::map<std::string, const GroundTruthAnnotation*> by_gt;
  std::map<std::string, const ExtractionResult*> by_result;
  std::set<std::string> duplicates;
  for (const auto& a : gt) {
    if (!by_gt.emplace(a.image_id, &a).second) duplicates.insert(a.image_id);
  }
  for (const auto& r : results) {
    if (!by_result.emplace(r.image_id, &r).second) duplicates.insert(r.image_id);
  }
  std::vector<std::string> offenders;
  for (const auto& [id, _] : by_gt) {
    if (!by_result.contains(id)) offenders.push_back(id + " (no extraction record)");
  }
  for (const auto& [id, _] : by_result) {
    if (!by_gt.contains(id)) offenders.push_back(id + " (no annotation)");
  }
  for (const auto& id : duplicates) offenders.push_back(id + " (duplicate)");
  if (!offenders.empty()) {
    std::string msg = "image ids do not align:";
    for (const auto& o : offenders) msg += " " + o + ";";
    throw Error(ErrorCode::kUnmatchedImages, msg);
  }

  std::vector<std::string> ids;
  ids.reserve(by_gt.size());
  for (const auto& [id, _] : by_gt) ids.push_back(id);

  EvaluationReport report;
  report.bucket_thresholds_mm = options.bucket_thresholds_mm;
  report.images.resize(ids.size());
  const bool with_masks = !masks.empty();
  parallel_for(ids.size(), options.jobs, [&](std::size_t i) {
    const std::string& id = ids[i];
    const PredictedMasks* pm = nullptr;
    static const PredictedMasks kNone;
    if (with_masks) {
      const auto it = masks.find(id);
      pm = it != masks.end() ? &it->second : &kNone;
    }
    report.images[i] = evaluate_image(*by_gt.at(id), *by_result.at(id), pm, options);
  });

  std::vector<double> tip_errors;
  std::vector<double> carina_errors;
  std::vector<double> distance_errors;
  std::vector<std::pair<double, double>> pairs;
  for (const auto& ev : report.images) {
    tally(report.tip, ev.tip, tip_errors);
    tally(report.carina, ev.carina, carina_errors);
    if (ev.distance_error_mm) {
      distance_errors.push_back(*ev.distance_error_mm);
      pairs.emplace_back(*ev.d1_mm, *ev.d2_mm);
    }
    if (!ev.gt_suitability) {
      ++report.confusion.without_gt_distance;
    } else {
      const std::size_t row = static_cast<std::size_t>(ev.pred_suitability);
      const std::size_t col = *ev.gt_suitability == Suitability::kSuitable ? 0 : 1;
      ++report.confusion.cells[row][col];
    }
  }
  report.tip.rates = recall_precision(report.tip.tp, report.tip.fn, report.tip.fp);
  report.carina.rates = recall_precision(report.carina.tp, report.carina.fn, report.carina.fp);
  report.tip.error = summarize(tip_errors, options.bucket_thresholds_mm);
  report.carina.error = summarize(carina_errors, options.bucket_thresholds_mm);
  report.distance = summarize(distance_errors, options.bucket_thresholds_mm);

  report.pearson.n_pairs = pairs.size();
  report.pearson.n_total = report.images.size();
  try {
    report.pearson.stats = pearson_stats(pairs);
  } catch (const Error& e) {
    report.pearson.unavailable_reason = e.what();
  }
  return report;
}

std::map<std::string, PredictedMasks> predicted_masks(const std::vector<DetectionSet>& sets) {
  std::map<std::string, PredictedMasks> out;
  for (const auto& set : sets) {
    const SelectedDetections sel = select_max_score(set);
    PredictedMasks& pm = out[set.image_id];
    if (sel.tube) pm.tube = sel.tube->mask;
    if (sel.carina) pm.carina = sel.carina->mask;
  }
  return out;
}

}  // namespace ettc
