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

#include "ettc/extraction.hpp"

#include <cmath>

#include "ettc/annotation_io.hpp"
#include "ettc/error.hpp"
#include "ettc/parallel.hpp"

namespace ettc {

using nlohmann::json;

std::string_view to_string(PointSource source) {
  switch (source) {
    case PointSource::kNone: return "none";
    case PointSource::kBox: return "box";
    case PointSource::kMask: return "mask";
  }
  return "none";
}

std::optional<PointSource> parse_point_source(std::string_view name) {
  for (const PointSource s : {PointSource::kNone, PointSource::kBox, PointSource::kMask}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

PixelPoint tip_from_mask(const BinaryMask& tube_mask) {
  return lowest_skeleton_point(skeletonize(tube_mask));
}

CarinaMaskPoint carina_from_mask(const BinaryMask& carina_mask, const ExtractionOptions& options) {
  const BinaryMask skeleton = skeletonize(carina_mask);
  const WindowSpec central_window(options.central_window, options.central_window);
  const PixelPoint central = densest_window_center(skeleton, skeleton, central_window);

  const BinaryMask edges = edge_pixels(carina_mask, options.edge_low, options.edge_high);
  const Patch patch = crop_patch(edges, central, options.patch_width, options.patch_height);
  if (patch.mask.empty()) return {central, central, true};

  const PixelPoint local_central{central.x - patch.offset.x, central.y - patch.offset.y};
  const WindowSpec feature_window(options.feature_window, options.feature_window);
  const PixelPoint local =
      densest_window_center(patch.mask, patch.mask, feature_window, local_central);
  return {{local.x + patch.offset.x, local.y + patch.offset.y}, central, false};
}

PixelPoint point_from_box(const BoxRegion& box) {
  return {static_cast<int>(std::floor(box.cx + 0.5)), static_cast<int>(std::floor(box.cy + 0.5))};
}

FusedPoint fuse_tip(std::optional<PixelPoint> box_pt, std::optional<PixelPoint> mask_pt) {
  if (box_pt) return {box_pt, PointSource::kBox};
  if (mask_pt) return {mask_pt, PointSource::kMask};
  return {};
}

FusedPoint fuse_carina(std::optional<PixelPoint> box_pt, std::optional<PixelPoint> mask_pt,
                       double threshold_px) {
  if (box_pt && mask_pt) {
    if (euclidean(*box_pt, *mask_pt) > threshold_px) return {mask_pt, PointSource::kMask};
    return {box_pt, PointSource::kBox};
  }
  if (box_pt) return {box_pt, PointSource::kBox};
  if (mask_pt) return {mask_pt, PointSource::kMask};
  return {};
}

ExtractionResult extract(const DetectionSet& dets, double pixel_spacing_mm,
                         const ExtractionOptions& options) {
  const SelectedDetections selected = select_max_score(dets);
  ExtractionResult r;
  r.image_id = dets.image_id;
  r.pixel_spacing_mm = pixel_spacing_mm;

  if (selected.tube && selected.tube->mask && !selected.tube->mask->empty()) {
    r.tip_mask_point = tip_from_mask(*selected.tube->mask);
  }
  if (selected.tube_tip_box && selected.tube_tip_box->box) {
    r.tip_box_point = point_from_box(*selected.tube_tip_box->box);
  }
  if (selected.carina && selected.carina->mask && !selected.carina->mask->empty()) {
    const CarinaMaskPoint c = carina_from_mask(*selected.carina->mask, options);
    r.carina_mask_point = c.point;
    r.carina_fallback = c.fallback;
  }
  if (selected.carina_box && selected.carina_box->box) {
    r.carina_box_point = point_from_box(*selected.carina_box->box);
  }

  const FusedPoint tip = fuse_tip(r.tip_box_point, r.tip_mask_point);
  const FusedPoint carina =
      fuse_carina(r.carina_box_point, r.carina_mask_point, options.fusion_threshold_px);
  r.tip_point = tip.point;
  r.tip_source = tip.source;
  r.carina_point = carina.point;
  r.carina_source = carina.source;

  if (r.tip_point && r.carina_point) {
    r.distance_px = euclidean(*r.tip_point, *r.carina_point);
    r.distance_mm = *r.distance_px * pixel_spacing_mm;
  }
  return r;
}

std::vector<ExtractionResult> extract_all(const std::vector<DetectionSet>& sets,
                                          const std::vector<double>& spacings,
                                          const ExtractionOptions& options, unsigned jobs) {
  if (sets.size() != spacings.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one pixel spacing is needed per detection set");
  }
  std::vector<ExtractionResult> results(sets.size());
  parallel_for(sets.size(), jobs,
               [&](std::size_t i) { results[i] = extract(sets[i], spacings[i], options); });
  return results;
}

namespace {

json point_json(const std::optional<PixelPoint>& p) {
  if (!p) return nullptr;
  return json::array({p->x, p->y});
}

json number_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

[[noreturn]] void record_fail(const std::string& where, const std::string& field,
                              const std::string& problem) {
  throw Error(ErrorCode::kParse, where + ": field '" + field + "': " + problem);
}

std::optional<PixelPoint> point_from(const json& rec, const std::string& field,
                                     const std::string& where) {
  if (!rec.contains(field) || rec.at(field).is_null()) return std::nullopt;
  const json& v = rec.at(field);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    record_fail(where, field, "expected null or [x, y]");
  }
  return PixelPoint{v[0].get<int>(), v[1].get<int>()};
}

std::optional<double> number_from(const json& rec, const std::string& field,
                                  const std::string& where) {
  if (!rec.contains(field) || rec.at(field).is_null()) return std::nullopt;
  if (!rec.at(field).is_number()) record_fail(where, field, "expected null or a number");
  return rec.at(field).get<double>();
}

PointSource source_from(const json& rec, const std::string& field, const std::string& where) {
  if (!rec.contains(field) || !rec.at(field).is_string()) {
    record_fail(where, field, "expected \"box\", \"mask\" or \"none\"");
  }
  const auto s = parse_point_source(rec.at(field).get<std::string>());
  if (!s) record_fail(where, field, "expected \"box\", \"mask\" or \"none\"");
  return *s;
}

}  // namespace

json to_json(const ExtractionResult& r) {
  return {{"image_id", r.image_id},
          {"pixel_spacing_mm", r.pixel_spacing_mm},
          {"tip", point_json(r.tip_point)},
          {"carina", point_json(r.carina_point)},
          {"tip_source", to_string(r.tip_source)},
          {"carina_source", to_string(r.carina_source)},
          {"tip_mask", point_json(r.tip_mask_point)},
          {"tip_box", point_json(r.tip_box_point)},
          {"carina_mask", point_json(r.carina_mask_point)},
          {"carina_box", point_json(r.carina_box_point)},
          {"carina_fallback", r.carina_fallback},
          {"distance_px", number_json(r.distance_px)},
          {"distance_mm", number_json(r.distance_mm)}};
}

ExtractionResult extraction_from_json(const json& rec, const std::string& where) {
  if (!rec.is_object()) throw Error(ErrorCode::kParse, where + ": expected an object");
  ExtractionResult r;
  if (!rec.contains("image_id") || !rec.at("image_id").is_string()) {
    record_fail(where, "image_id", "expected a string");
  }
  r.image_id = rec.at("image_id").get<std::string>();
  r.pixel_spacing_mm = number_from(rec, "pixel_spacing_mm", where).value_or(0.0);
  r.tip_point = point_from(rec, "tip", where);
  r.carina_point = point_from(rec, "carina", where);
  r.tip_source = source_from(rec, "tip_source", where);
  r.carina_source = source_from(rec, "carina_source", where);
  r.tip_mask_point = point_from(rec, "tip_mask", where);
  r.tip_box_point = point_from(rec, "tip_box", where);
  r.carina_mask_point = point_from(rec, "carina_mask", where);
  r.carina_box_point = point_from(rec, "carina_box", where);
  if (rec.contains("carina_fallback")) {
    if (!rec.at("carina_fallback").is_boolean()) {
      record_fail(where, "carina_fallback", "expected a boolean");
    }
    r.carina_fallback = rec.at("carina_fallback").get<bool>();
  }
  r.distance_px = number_from(rec, "distance_px", where);
  r.distance_mm = number_from(rec, "distance_mm", where);
  if (r.distance_px.has_value() != (r.tip_point && r.carina_point)) {
    record_fail(where, "distance_px", "must be present exactly when tip and carina are");
  }
  return r;
}

json records_to_json(const std::vector<ExtractionResult>& results) {
  json doc = json::array();
  for (const auto& r : results) doc.push_back(to_json(r));
  return doc;
}

std::vector<ExtractionResult> records_from_json(const json& doc, const std::string& source) {
  if (!doc.is_array()) throw Error(ErrorCode::kParse, source + ": expected a JSON array");
  std::vector<ExtractionResult> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(extraction_from_json(doc[i], source + ": record " + std::to_string(i)));
  }
  return out;
}

std::vector<ExtractionResult> load_records(const std::filesystem::path& path) {
  return records_from_json(read_json_file(path), path.string());
}

}  // namespace ettc
