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

#include "ettc/annotation_io.hpp"

#include <fstream>
#include <sstream>

#include "ettc/error.hpp"
#include "ettc/image_io.hpp"

namespace ettc {

using nlohmann::json;

namespace {

// Locates a failure as "<file>: record <i>: field '<name>': <problem>".
class RecordContext {
 public:
  RecordContext(const std::string& source, std::size_t index) : source_(source), index_(index) {}

  [[noreturn]] void fail(const std::string& field, const std::string& problem) const {
    std::string msg = source_ + ": record " + std::to_string(index_);
    if (!field.empty()) msg += ": field '" + field + "'";
    throw Error(ErrorCode::kParse, msg + ": " + problem);
  }

  const json& require(const json& rec, const std::string& field) const {
    if (!rec.contains(field)) fail(field, "missing");
    return rec.at(field);
  }

  std::string string_field(const json& rec, const std::string& field) const {
    const json& v = require(rec, field);
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  int int_field(const json& rec, const std::string& field) const {
    const json& v = require(rec, field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
  }

  double number_field(const json& rec, const std::string& field) const {
    const json& v = require(rec, field);
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  template <std::size_t N>
  std::optional<std::array<PixelPoint, N>> points_field(const json& rec,
                                                        const std::string& field) const {
    if (!rec.contains(field) || rec.at(field).is_null()) return std::nullopt;
    const json& v = rec.at(field);
    if (!v.is_array() || v.size() != N) {
      fail(field, "expected null or " + std::to_string(N) + " [x, y] points");
    }
    std::array<PixelPoint, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      const json& p = v[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
          !p[1].is_number_integer()) {
        fail(field, "point " + std::to_string(i) + " is not an integer [x, y] pair");
      }
      out[i] = {p[0].get<int>(), p[1].get<int>()};
    }
    return out;
  }

 private:
  const std::string& source_;
  std::size_t index_;
};

template <std::size_t N>
json points_to_json(const std::optional<std::array<PixelPoint, N>>& pts) {
  if (!pts) return nullptr;
  json arr = json::array();
  for (const PixelPoint p : *pts) arr.push_back({p.x, p.y});
  return arr;
}

void require_array(const json& doc, const std::string& source) {
  if (!doc.is_array()) throw Error(ErrorCode::kParse, source + ": expected a JSON array of records");
}

}  // namespace

std::vector<GroundTruthAnnotation> annotations_from_json(const json& doc,
                                                         const std::string& source) {
  require_array(doc, source);
  std::vector<GroundTruthAnnotation> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const RecordContext ctx(source, i);
    const json& rec = doc[i];
    if (!rec.is_object()) ctx.fail("", "expected an object");
    GroundTruthAnnotation a;
    a.image_id = ctx.string_field(rec, "image_id");
    a.image_width = ctx.int_field(rec, "image_width");
    a.image_height = ctx.int_field(rec, "image_height");
    a.pixel_spacing_mm = ctx.number_field(rec, "pixel_spacing_mm");
    if (!(a.pixel_spacing_mm > 0.0)) ctx.fail("pixel_spacing_mm", "must be > 0");
    a.ett_points = ctx.points_field<kTubePointCount>(rec, "ett_points");
    a.bifurcation_points = ctx.points_field<kBifurcationPointCount>(rec, "bifurcation_points");
    try {
      a.validate();
    } catch (const Error& e) {
      ctx.fail("", e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

json annotations_to_json(const std::vector<GroundTruthAnnotation>& annotations) {
  json doc = json::array();
  for (const auto& a : annotations) {
    doc.push_back({{"image_id", a.image_id},
                   {"image_width", a.image_width},
                   {"image_height", a.image_height},
                   {"pixel_spacing_mm", a.pixel_spacing_mm},
                   {"ett_points", points_to_json(a.ett_points)},
                   {"bifurcation_points", points_to_json(a.bifurcation_points)}});
  }
  return doc;
}

std::vector<GroundTruthAnnotation> load_annotations(const std::filesystem::path& path) {
  return annotations_from_json(read_json_file(path), path.string());
}

void save_annotations(const std::filesystem::path& path,
                      const std::vector<GroundTruthAnnotation>& annotations) {
  write_text_file(path, annotations_to_json(annotations).dump(1) + "\n");
}

ImageSizes image_sizes(const std::vector<GroundTruthAnnotation>& annotations) {
  ImageSizes sizes;
  for (const auto& a : annotations) sizes[a.image_id] = {a.image_width, a.image_height};
  return sizes;
}

std::vector<DetectionSet> detections_from_json(const json& doc, const std::string& source,
                                               const std::filesystem::path& base_dir,
                                               const ImageSizes& sizes) {
  require_array(doc, source);
  std::vector<DetectionSet> sets;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const RecordContext ctx(source, i);
    const json& rec = doc[i];
    if (!rec.is_object()) ctx.fail("", "expected an object");
    const std::string image_id = ctx.string_field(rec, "image_id");
    ScoredDetection det;
    const std::string cls_name = ctx.string_field(rec, "class");
    const auto cls = parse_detection_class(cls_name);
    if (!cls) ctx.fail("class", "unknown class \"" + cls_name + "\"");
    det.cls = *cls;
    det.score = ctx.number_field(rec, "score");
    if (!(det.score >= 0.0 && det.score <= 1.0)) ctx.fail("score", "must lie in [0, 1]");

    if (is_mask_class(det.cls)) {
      if (rec.contains("mask_png")) {
        const json& v = rec.at("mask_png");
        if (!v.is_string()) ctx.fail("mask_png", "expected a path string");
        std::filesystem::path p = v.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        try {
          det.mask = read_mask_png(p);
        } catch (const Error& e) {
          ctx.fail("mask_png", e.what());
        }
      } else if (rec.contains("mask_rle")) {
        const json& v = rec.at("mask_rle");
        if (!v.is_array()) ctx.fail("mask_rle", "expected an array of run lengths");
        std::vector<std::uint32_t> runs;
        runs.reserve(v.size());
        for (const json& r : v) {
          if (!r.is_number_unsigned() && !(r.is_number_integer() && r.get<long long>() >= 0)) {
            ctx.fail("mask_rle", "run lengths must be non-negative integers");
          }
          runs.push_back(r.get<std::uint32_t>());
        }
        int w = 0;
        int h = 0;
        if (rec.contains("mask_size")) {
          const json& s = rec.at("mask_size");
          if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() ||
              !s[1].is_number_integer()) {
            ctx.fail("mask_size", "expected [width, height]");
          }
          w = s[0].get<int>();
          h = s[1].get<int>();
        } else if (auto it = sizes.find(image_id); it != sizes.end()) {
          std::tie(w, h) = it->second;
        } else {
          ctx.fail("mask_size", "missing and image size unknown for \"" + image_id + "\"");
        }
        try {
          det.mask = decode_rle(runs, w, h);
        } catch (const Error& e) {
          ctx.fail("mask_rle", e.what());
        }
      } else {
        ctx.fail("mask_png", "mask class needs mask_png or mask_rle");
      }
    } else {
      const json& v = ctx.require(rec, "box");
      if (!v.is_array() || v.size() != 4) ctx.fail("box", "expected [cx, cy, w, h]");
      for (const json& c : v) {
        if (!c.is_number()) ctx.fail("box", "expected [cx, cy, w, h] numbers");
      }
      det.box = BoxRegion{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                          v[3].get<double>()};
    }

    auto [it, inserted] = slot.try_emplace(image_id, sets.size());
    if (inserted) sets.push_back(DetectionSet{image_id, {}});
    sets[it->second].detections.push_back(std::move(det));
  }
  return sets;
}

json detections_to_json(const std::vector<DetectionSet>& sets) {
  json doc = json::array();
  for (const auto& set : sets) {
    for (const auto& d : set.detections) {
      json rec = {{"image_id", set.image_id}, {"class", to_string(d.cls)}, {"score", d.score}};
      if (d.mask) {
        rec["mask_rle"] = encode_rle(*d.mask);
        rec["mask_size"] = {d.mask->width(), d.mask->height()};
      }
      if (d.box) rec["box"] = {d.box->cx, d.box->cy, d.box->w, d.box->h};
      doc.push_back(std::move(rec));
    }
  }
  return doc;
}

std::vector<DetectionSet> load_detections(const std::filesystem::path& path,
                                          const ImageSizes& sizes) {
  return detections_from_json(read_json_file(path), path.string(), path.parent_path(), sizes);
}

void save_detections(const std::filesystem::path& path, const std::vector<DetectionSet>& sets) {
  write_text_file(path, detections_to_json(sets).dump() + "\n");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace ettc
