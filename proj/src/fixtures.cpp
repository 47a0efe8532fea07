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

#include "ettc/fixtures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ettc/error.hpp"

namespace ettc::fixtures {

using nlohmann::json;

namespace {

PixelPoint operator+(PixelPoint a, PixelPoint b) { return {a.x + b.x, a.y + b.y}; }
PixelPoint operator-(PixelPoint a, PixelPoint b) { return {a.x - b.x, a.y - b.y}; }

// Portable integer draw in [lo, hi]; std distributions are not reproducible
// across standard libraries, the engine is.
int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng() % span);
}

double uniform_score(std::mt19937_64& rng, int lo_percent, int hi_percent) {
  return uniform_int(rng, lo_percent, hi_percent) / 100.0;
}

void require_inside(const FixtureSpec& spec, PixelPoint p, const char* what) {
  if (p.x < 0 || p.y < 0 || p.x >= spec.width || p.y >= spec.height) {
    throw Error(ErrorCode::kInvalidSpec, fmt::format("{}: {} ({}, {}) lies outside {}x{}",
                                                     spec.image_id, what, p.x, p.y, spec.width,
                                                     spec.height));
  }
}

BoxRegion box_at(PixelPoint p) {
  return {static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(kFeatureBoxSide),
          static_cast<double>(kFeatureBoxSide)};
}

PixelPoint v(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json pj(const std::optional<PixelPoint>& p) {
  if (!p) return nullptr;
  return json::array({p->x, p->y});
}

json dj(const std::optional<double>& d) {
  if (!d) return nullptr;
  return *d;
}

int whole_pixels(double mm, double spacing, const std::string& id) {
  const double px = mm / spacing;
  const double rounded = std::round(px);
  if (std::fabs(px - rounded) > 1e-9 || rounded < 0) {
    throw Error(ErrorCode::kInvalidSpec,
                fmt::format("{}: planted error {} mm is not a whole number of {} mm pixels", id,
                            mm, spacing));
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<PixelPoint> bifurcation_outline(const BifurcationGeometry& g) {
  const PixelPoint a = g.apex;
  const int w = g.trachea_half_width;
  const int k = g.notch_depth;
  const int lb = g.bronchus_length;
  const int end_y = a.y + lb;
  const PixelPoint bro{a.x + w + (lb + w) / 2, end_y};
  const PixelPoint bri{a.x + k + (lb - k) / 2, end_y};
  const PixelPoint bli{a.x - k - (lb - k) / 2, end_y};
  const PixelPoint blo{a.x - w - (lb + w) / 2, end_y};
  // Each bronchus tapers to a point on its own axis (direction (1, 2)). The
  // long taper keeps both end corners nearly straight, so thinning leaves no
  // side branches there.
  const int taper = std::max(1, bro.x - bri.x);
  const PixelPoint br_tip{(bro.x + bri.x) / 2 + taper, end_y + 2 * taper};
  const PixelPoint bl_tip{(bli.x + blo.x) / 2 - taper, end_y + 2 * taper};
  return {
      {a.x, a.y - g.trachea_length - w},  // tapered top
      {a.x + w, a.y - g.trachea_length},
      {a.x + w, a.y - w},                 // right outer corner
      bro, br_tip, bri,
      {a.x + k, a.y + k},
      a,
      {a.x - k, a.y + k},
      bli, bl_tip, blo,
      {a.x - w, a.y - w},                 // left outer corner
      {a.x - w, a.y - g.trachea_length},
  };
}

BifurcationPoints bifurcation_labels(const BifurcationGeometry& g) {
  const auto o = bifurcation_outline(g);
  // TL, OL, BLo, BLi, apex, BRi, BRo, OR, TR
  return {o[13], o[12], o[11], o[9], o[7], o[5], o[3], o[2], o[1]};
}

TubePoints tube_labels(const TubeGeometry& g) {
  const double len = std::sqrt(static_cast<double>(g.direction.x) * g.direction.x +
                               static_cast<double>(g.direction.y) * g.direction.y);
  const double ux = g.direction.x / len;
  const double uy = g.direction.y / len;
  const PixelPoint side{static_cast<int>(std::lround(-uy * g.half_width)),
                        static_cast<int>(std::lround(ux * g.half_width))};
  const PixelPoint back{static_cast<int>(std::lround(ux * g.end_length)),
                        static_cast<int>(std::lround(uy * g.end_length))};
  const PixelPoint p2 = g.tip + side;
  const PixelPoint p3 = g.tip - side;
  return {p2 - back, p2, p3, p3 - back};
}

void FixtureSpec::validate() const {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidSpec, "image size must be positive");
  if (!(pixel_spacing_mm > 0.0)) throw Error(ErrorCode::kInvalidSpec, "pixel spacing must be > 0");
  if (tube.half_width < 1 || tube.end_length < 1 || (tube.direction.x == 0 && tube.direction.y == 0)) {
    throw Error(ErrorCode::kInvalidSpec, image_id + ": tube widths and length must be >= 1");
  }
  const auto& b = bifurcation;
  if (b.trachea_half_width < 2 || b.notch_depth < 1 || b.trachea_length <= b.trachea_half_width ||
      b.bronchus_length <= b.notch_depth) {
    throw Error(ErrorCode::kInvalidSpec, image_id + ": bifurcation dimensions are inconsistent");
  }
  const Perturbation& p = perturbation;
  for (const double s : {p.tube_score, p.carina_score, p.tip_box_score, p.carina_box_score}) {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::kInvalidSpec, image_id + ": bad score");
  }
  for (const PixelPoint q : tube_labels(tube)) {
    require_inside(*this, q, "tube label");
    require_inside(*this, q + p.tip_shift, "shifted tube");
  }
  require_inside(*this, tube.tip + p.tip_shift + p.tip_box_offset, "tip box");
  for (const PixelPoint q : bifurcation_outline(bifurcation)) {
    require_inside(*this, q, "airway outline");
    require_inside(*this, q + p.carina_shift, "shifted airway");
  }
  require_inside(*this, b.apex + p.carina_shift + p.carina_box_offset, "carina box");
}

Fixture generate(const FixtureSpec& spec) {
  spec.validate();
  const Perturbation& p = spec.perturbation;
  std::mt19937_64 rng(splitmix64(spec.seed));

  Fixture f;
  GroundTruthAnnotation& a = f.annotation;
  a.image_id = spec.image_id;
  a.image_width = spec.width;
  a.image_height = spec.height;
  a.pixel_spacing_mm = spec.pixel_spacing_mm;
  a.ett_points = tube_labels(spec.tube);
  a.bifurcation_points = bifurcation_labels(spec.bifurcation);

  f.tube_mask = rasterize_polygon(*a.ett_points, spec.width, spec.height);
  f.carina_mask = rasterize_polygon(bifurcation_outline(spec.bifurcation), spec.width, spec.height);

  const PixelPoint mp = derive_mp(a);
  const PixelPoint p9 = carina_gt_point(a);

  std::vector<ScoredDetection> main;
  if (!p.omit_tube_mask) {
    main.push_back({DetectionClass::kTube, p.tube_score,
                    f.tube_mask.translated(p.tip_shift.x, p.tip_shift.y), std::nullopt});
  }
  if (!p.omit_tip_box) {
    main.push_back({DetectionClass::kTubeTipBox, p.tip_box_score, std::nullopt,
                    box_at(mp + p.tip_shift + p.tip_box_offset)});
  }
  if (!p.omit_carina_mask) {
    main.push_back({DetectionClass::kCarina, p.carina_score,
                    f.carina_mask.translated(p.carina_shift.x, p.carina_shift.y), std::nullopt});
  }
  if (!p.omit_carina_box) {
    main.push_back({DetectionClass::kCarinaBox, p.carina_box_score, std::nullopt,
                    box_at(p9 + p.carina_shift + p.carina_box_offset)});
  }

  // Distractors score strictly below the detection they shadow and carry junk
  // geometry, so only max-score selection keeps them out of the result.
  std::vector<ScoredDetection> all;
  for (auto& d : main) {
    ScoredDetection junk;
    junk.cls = d.cls;
    junk.score = std::floor(d.score * uniform_int(rng, 10, 90)) / 100.0;
    const PixelPoint c{uniform_int(rng, 8, spec.width - 9), uniform_int(rng, 8, spec.height - 9)};
    if (is_mask_class(d.cls)) {
      BinaryMask m(spec.width, spec.height);
      for (int y = c.y - 6; y <= c.y + 6; ++y) {
        for (int x = c.x - 6; x <= c.x + 6; ++x) m.set_clipped(x, y);
      }
      junk.mask = std::move(m);
    } else {
      junk.box = box_at(c);
    }
    const bool junk_first = p.add_distractors && (rng() & 1U) != 0;
    if (junk_first) all.push_back(junk);
    all.push_back(std::move(d));
    if (p.add_distractors && !junk_first) all.push_back(std::move(junk));
  }
  f.detections = DetectionSet{spec.image_id, std::move(all)};

  ExpectedEnvelope& e = f.expected;
  if (!p.omit_tube_mask) e.tip_mask_nominal = mp + p.tip_shift;
  if (!p.omit_carina_mask) e.carina_mask_nominal = p9 + p.carina_shift;
  if (!p.omit_tip_box) {
    e.tip = mp + p.tip_shift + p.tip_box_offset;
    e.tip_source = PointSource::kBox;
  } else if (!p.omit_tube_mask) {
    e.tip = e.tip_mask_nominal;
    e.tip_source = PointSource::kMask;
    e.tip_radius_px = kMaskQuantizationPx;
  }
  const std::optional<PixelPoint> carina_box =
      p.omit_carina_box ? std::nullopt
                        : std::optional<PixelPoint>(p9 + p.carina_shift + p.carina_box_offset);
  const FusedPoint c = fuse_carina(carina_box, e.carina_mask_nominal);
  e.carina = c.point;
  e.carina_source = c.source;
  if (c.source == PointSource::kMask) e.carina_radius_px = kMaskQuantizationPx;
  return f;
}

FixtureSpec random_spec(std::uint64_t seed, const std::string& image_id) {
  std::mt19937_64 rng(splitmix64(seed));
  FixtureSpec s;
  s.seed = seed;
  s.image_id = image_id;
  s.width = 512;
  s.height = 640;
  s.pixel_spacing_mm = 0.5;

  BifurcationGeometry& b = s.bifurcation;
  b.trachea_half_width = uniform_int(rng, 10, 16);
  b.notch_depth = uniform_int(rng, 3, 5);
  b.trachea_length = uniform_int(rng, 85, 110);
  b.bronchus_length = uniform_int(rng, 85, 110);
  b.apex = {uniform_int(rng, 200, 312), uniform_int(rng, 330, 360)};

  TubeGeometry& t = s.tube;
  t.half_width = uniform_int(rng, 1, 2);
  t.end_length = uniform_int(rng, 30, 50);
  t.direction = {uniform_int(rng, -2, 2), 8};
  t.tip = {b.apex.x + uniform_int(rng, -20, 20), b.apex.y - uniform_int(rng, 30, 170)};

  Perturbation& p = s.perturbation;
  p.tube_score = uniform_score(rng, 80, 99);
  p.carina_score = uniform_score(rng, 80, 99);
  p.tip_box_score = uniform_score(rng, 80, 99);
  p.carina_box_score = uniform_score(rng, 80, 99);
  return s;
}

Cohort generate_cohort(std::size_t n, std::uint64_t seed, const ErrorProfile& profile) {
  if (n == 0) throw Error(ErrorCode::kInvalidSpec, "cohort needs at least one image");
  if (profile.tip_errors_mm.empty() || profile.carina_errors_mm.empty() ||
      profile.pixel_spacings_mm.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "error profile cycles must be nonempty");
  }
  Cohort cohort;
  cohort.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = fmt::format("img_{:04d}", i);
    FixtureSpec spec = random_spec(splitmix64(seed ^ splitmix64(i)), id);
    spec.tube.direction = {0, 1};
    spec.tube.tip.x = spec.bifurcation.apex.x;
    const double s = profile.pixel_spacings_mm[i % profile.pixel_spacings_mm.size()];
    spec.pixel_spacing_mm = s;

    const bool outlier = profile.outlier_every != 0 && (i + 1) % profile.outlier_every == 0;
    const bool undetected =
        profile.undetected_every != 0 && (i + 1) % profile.undetected_every == 0;
    const int tip_px =
        whole_pixels(profile.tip_errors_mm[i % profile.tip_errors_mm.size()], s, id);
    const int carina_px =
        whole_pixels(profile.carina_errors_mm[i % profile.carina_errors_mm.size()], s, id);

    Perturbation& p = spec.perturbation;
    p.tip_shift = outlier ? PixelPoint{0, profile.outlier_shift_px} : PixelPoint{0, -tip_px};
    p.carina_shift = {0, carina_px};
    p.omit_carina_mask = undetected;
    p.omit_carina_box = undetected;

    Fixture f = generate(spec);
    ManifestEntry m;
    m.image_id = id;
    m.pixel_spacing_mm = s;
    m.gt_tip = derive_mp(f.annotation);
    m.gt_carina = carina_gt_point(f.annotation);
    m.pred_tip = m.gt_tip + p.tip_shift;
    m.outlier = outlier;
    m.undetected = undetected;
    m.planted_tip_error_mm = std::abs(p.tip_shift.y) * s;
    m.d1_mm = std::abs(m.gt_carina.y - m.gt_tip.y) * s;
    if (!undetected) {
      m.pred_carina = m.gt_carina + p.carina_shift;
      m.planted_carina_error_mm = carina_px * s;
      m.d2_mm = std::abs(m.pred_carina->y - m.pred_tip->y) * s;
      m.planted_distance_error_mm = std::fabs(m.d1_mm - *m.d2_mm);
    }
    cohort.annotations.push_back(std::move(f.annotation));
    cohort.detections.push_back(std::move(f.detections));
    cohort.manifest.push_back(std::move(m));
  }
  return cohort;
}

json manifest_to_json(const Cohort& cohort) {
  json images = json::array();
  for (const auto& m : cohort.manifest) {
    images.push_back({{"image_id", m.image_id},
                      {"pixel_spacing_mm", m.pixel_spacing_mm},
                      {"gt_tip", pj(m.gt_tip)},
                      {"gt_carina", pj(m.gt_carina)},
                      {"pred_tip", pj(m.pred_tip)},
                      {"pred_carina", pj(m.pred_carina)},
                      {"outlier", m.outlier},
                      {"undetected", m.undetected},
                      {"planted_tip_error_mm", m.planted_tip_error_mm},
                      {"planted_carina_error_mm", dj(m.planted_carina_error_mm)},
                      {"d1_mm", m.d1_mm},
                      {"d2_mm", dj(m.d2_mm)},
                      {"planted_distance_error_mm", dj(m.planted_distance_error_mm)}});
  }
  return {{"seed", cohort.seed}, {"count", cohort.manifest.size()}, {"images", images}};
}

std::vector<ManifestEntry> manifest_from_json(const json& doc) {
  std::vector<ManifestEntry> out;
  try {
    for (const json& j : doc.at("images")) {
      ManifestEntry m;
      m.image_id = j.at("image_id").get<std::string>();
      m.pixel_spacing_mm = j.at("pixel_spacing_mm").get<double>();
      m.gt_tip = v(j.at("gt_tip"));
      m.gt_carina = v(j.at("gt_carina"));
      if (!j.at("pred_tip").is_null()) m.pred_tip = v(j.at("pred_tip"));
      if (!j.at("pred_carina").is_null()) m.pred_carina = v(j.at("pred_carina"));
      m.outlier = j.at("outlier").get<bool>();
      m.undetected = j.at("undetected").get<bool>();
      m.planted_tip_error_mm = j.at("planted_tip_error_mm").get<double>();
      if (!j.at("planted_carina_error_mm").is_null()) {
        m.planted_carina_error_mm = j.at("planted_carina_error_mm").get<double>();
      }
      m.d1_mm = j.at("d1_mm").get<double>();
      if (!j.at("d2_mm").is_null()) m.d2_mm = j.at("d2_mm").get<double>();
      if (!j.at("planted_distance_error_mm").is_null()) {
        m.planted_distance_error_mm = j.at("planted_distance_error_mm").get<double>();
      }
      out.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("manifest: ") + e.what());
  }
  return out;
}

}  // namespace ettc::fixtures
