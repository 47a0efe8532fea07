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

#include <doctest.h>

#include <boost/math/statistics/univariate_statistics.hpp>

#include <cmath>
#include <random>

#include "ettc/error.hpp"
#include "ettc/fixtures.hpp"
#include "ettc/metrics.hpp"
#include "manifest_oracle.hpp"
#include "oracles.hpp"

using namespace ettc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ettc::Error");
  return ErrorCode::kIo;
}

BinaryMask square(int w, int h, int x0, int y0, int side_x, int side_y) {
  BinaryMask m(w, h);
  for (int y = y0; y < y0 + side_y; ++y) {
    for (int x = x0; x < x0 + side_x; ++x) m.set(x, y);
  }
  return m;
}

GroundTruthAnnotation vertical_case(const std::string& id, int tip_y, int carina_y, double s) {
  GroundTruthAnnotation a;
  a.image_id = id;
  a.image_width = 200;
  a.image_height = 400;
  a.pixel_spacing_mm = s;
  a.ett_points = TubePoints{PixelPoint{99, tip_y - 30}, {99, tip_y}, {101, tip_y}, {101, tip_y - 30}};
  const int c = carina_y;
  a.bifurcation_points = BifurcationPoints{PixelPoint{90, c - 60}, {90, c - 10}, {70, c + 30},
                                           {80, c + 30},           {100, c},    {120, c + 30},
                                           {130, c + 30},          {110, c - 10}, {110, c - 60}};
  return a;
}

PixelPoint shifted(PixelPoint p, int dy) { return {p.x, p.y + dy}; }

ExtractionResult result_for(const std::string& id, std::optional<PixelPoint> tip,
                            std::optional<PixelPoint> carina, double s) {
  ExtractionResult r;
  r.image_id = id;
  r.pixel_spacing_mm = s;
  r.tip_point = tip;
  r.carina_point = carina;
  r.tip_source = tip ? PointSource::kBox : PointSource::kNone;
  r.carina_source = carina ? PointSource::kBox : PointSource::kNone;
  if (tip && carina) {
    r.distance_px = euclidean(*tip, *carina);
    r.distance_mm = *r.distance_px * s;
  }
  return r;
}

}  // namespace

TEST_CASE("dice") {
  const BinaryMask a = square(10, 10, 0, 0, 4, 4);
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(a, square(10, 10, 5, 5, 4, 4)) == 0.0);
  CHECK(dice(a, square(10, 10, 0, 2, 4, 4)) == 0.5);
  CHECK(code_of([&] { dice(a, BinaryMask(10, 11)); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { dice(BinaryMask(3, 3), BinaryMask(3, 3)); }) == ErrorCode::kUndefined);
  CHECK(dice(a, BinaryMask(10, 10)) == 0.0);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const BinaryMask x = oracle::random_mask(rng, 17, 13, 0.3);
    const BinaryMask y = oracle::random_mask(rng, 17, 13, 0.5);
    std::size_t inter = 0;
    for (int py = 0; py < 13; ++py) {
      for (int px = 0; px < 17; ++px) inter += (x.get(px, py) && y.get(px, py)) ? 1 : 0;
    }
    const double want = 2.0 * static_cast<double>(inter) / static_cast<double>(x.count() + y.count());
    CHECK(dice(x, y) == want);
    CHECK(dice(x, y) == dice(y, x));
    if (!x.empty()) CHECK(dice(x, x) == 1.0);
  }
}

TEST_CASE("object error") {
  const ObjectError e = object_error({0, 0}, {3, 4}, 0.7);
  CHECK(e.px == 5.0);
  CHECK(e.mm == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(object_error({0, 0}, {3, 4}, 0.5).mm == 2.5);
  CHECK(object_error({7, 7}, {7, 7}, 0.3).px == 0.0);
  CHECK(code_of([] { object_error({0, 0}, {1, 1}, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { object_error({0, 0}, {1, 1}, -1.0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("classify detection") {
  CHECK(classify_detection(0.6, 150.0, true, true) == MatchFlags{true, false, false});
  CHECK(classify_detection(0.3, 100.0, true, true) == MatchFlags{true, false, false});
  CHECK(classify_detection(0.59, 100.01, true, true) == MatchFlags{false, true, true});
  CHECK(classify_detection(std::nullopt, std::nullopt, true, false) ==
        MatchFlags{false, false, true});
  CHECK(classify_detection(std::nullopt, std::nullopt, false, true) ==
        MatchFlags{false, true, false});
  CHECK(classify_detection(std::nullopt, std::nullopt, false, false) == MatchFlags{});
  CHECK(classify_detection(std::nullopt, 100.0, true, true) == MatchFlags{true, false, false});
  CHECK(classify_detection(0.6, std::nullopt, true, true) == MatchFlags{true, false, false});
  CHECK(code_of([] { classify_detection(0.7, std::nullopt, true, false); }) ==
        ErrorCode::kInvalidArgument);

  // Exhaustive: presence x presence x criterion outcome.
  for (const bool gt : {false, true}) {
    for (const bool pred : {false, true}) {
      for (const bool pass : {false, true}) {
        const bool both = gt && pred;
        const std::optional<double> d = both ? std::optional<double>(pass ? 0.8 : 0.1) : std::nullopt;
        const std::optional<double> err =
            both ? std::optional<double>(pass ? 10.0 : 300.0) : std::nullopt;
        const MatchFlags f = classify_detection(d, err, gt, pred);
        CHECK(f.tp == (both && pass));
        CHECK(f.fp == (pred && !f.tp));
        CHECK(f.fn == (gt && !f.tp));
        if (gt) CHECK(f.tp != f.fn);
      }
    }
  }
}

TEST_CASE("recall and precision") {
  CHECK(recall(96, 4) == 0.96);
  CHECK(precision(96, 4) == 0.96);
  CHECK(code_of([] { recall(0, 0); }) == ErrorCode::kUndefined);
  CHECK(code_of([] { precision(0, 0); }) == ErrorCode::kUndefined);
  const RecallPrecision none = recall_precision(0, 0, 0);
  CHECK_FALSE(none.recall);
  CHECK_FALSE(none.precision);
  const RecallPrecision only_fp = recall_precision(0, 0, 3);
  CHECK_FALSE(only_fp.recall);
  CHECK(only_fp.precision == 0.0);

  std::mt19937_64 rng(22);
  for (int i = 0; i < 500; ++i) {
    const auto tp = static_cast<std::size_t>(oracle::uniform(rng, 0, 50));
    const auto fn = static_cast<std::size_t>(oracle::uniform(rng, 0, 50));
    const auto fp = static_cast<std::size_t>(oracle::uniform(rng, 0, 50));
    if (tp + fn > 0) {
      const double r = recall(tp, fn);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
      CHECK(recall(tp, fn + 1) <= r);
    }
    if (tp + fp > 0) {
      const double p = precision(tp, fp);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(precision(tp, fp + 1) <= p);
    }
  }
}

TEST_CASE("distance error and suitability") {
  CHECK(distance_error(50, 44) == 6.0);
  CHECK(distance_error(44, 50) == 6.0);
  CHECK(distance_error(31.5, 31.5) == 0.0);

  CHECK(suitability(45.0) == Suitability::kSuitable);
  CHECK(suitability(20.0) == Suitability::kSuitable);
  CHECK(suitability(70.0) == Suitability::kSuitable);
  CHECK(suitability(19.9) == Suitability::kUnsuitable);
  CHECK(suitability(70.1) == Suitability::kUnsuitable);
  CHECK(suitability(std::nullopt) == Suitability::kUndetection);
  CHECK(suitability(25.0, {30.0, 60.0}) == Suitability::kUnsuitable);
  CHECK(to_string(Suitability::kUndetection) == "undetection");
}

TEST_CASE("bucket distribution") {
  const std::vector<double> a{1, 6, 12, 25};
  CHECK(bucket_distribution(a) == std::vector<double>{0.25, 0.5, 0.75, 0.75});
  const std::vector<double> zeros(7, 0.0);
  CHECK(bucket_distribution(zeros) == std::vector<double>{1, 1, 1, 1});
  const std::vector<double> edges{5, 10, 15, 20};
  CHECK(bucket_distribution(edges) == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(code_of([] { bucket_distribution(std::vector<double>{}); }) == ErrorCode::kUndefined);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> e(static_cast<std::size_t>(oracle::uniform(rng, 1, 40)));
    for (auto& v : e) v = u(rng);
    const auto b = bucket_distribution(e);
    for (std::size_t k = 1; k < b.size(); ++k) CHECK(b[k - 1] <= b[k]);
  }
}

TEST_CASE("evaluate on small datasets") {
  SUBCASE("one perfect image") {
    const auto gt = vertical_case("a", 100, 200, 0.5);
    const auto r = result_for("a", derive_mp(gt), carina_gt_point(gt), 0.5);
    const EvaluationReport rep = evaluate({gt}, {r});
    CHECK(rep.tip.rates.recall == 1.0);
    CHECK(rep.tip.rates.precision == 1.0);
    CHECK(rep.carina.rates.recall == 1.0);
    CHECK(rep.carina.rates.precision == 1.0);
    CHECK(rep.tip.error.mean_mm == 0.0);
    CHECK(rep.carina.error.mean_mm == 0.0);
    CHECK(rep.distance.mean_mm == 0.0);
    CHECK_FALSE(rep.distance.std_mm);
    CHECK(rep.images[0].d1_mm == 50.0);
    const auto& c = rep.confusion.cells;
    CHECK(c[0] == std::array<std::size_t, 2>{1, 0});
    CHECK(c[1] == std::array<std::size_t, 2>{0, 0});
    CHECK(c[2] == std::array<std::size_t, 2>{0, 0});
    CHECK_FALSE(rep.pearson.stats);
    CHECK(rep.pearson.n_pairs == 1);
  }
  SUBCASE("undetected carina lands in the undetection row and leaves the pairs") {
    std::vector<GroundTruthAnnotation> gts;
    std::vector<ExtractionResult> rs;
    for (int i = 0; i < 6; ++i) {
      const std::string id = "i" + std::to_string(i);
      const auto gt = vertical_case(id, 100 + 7 * i, 250, 0.5);
      gts.push_back(gt);
      const PixelPoint tip = shifted(derive_mp(gt), i % 3);
      rs.push_back(result_for(id, tip, i == 4 ? std::nullopt : std::optional(carina_gt_point(gt)),
                              0.5));
    }
    const EvaluationReport rep = evaluate(gts, rs);
    CHECK(rep.pearson.n_total == 6);
    CHECK(rep.pearson.n_pairs == 5);
    REQUIRE(rep.pearson.stats);
    CHECK(rep.confusion.cells[2][0] + rep.confusion.cells[2][1] == 1);
    CHECK(rep.images[4].pred_suitability == Suitability::kUndetection);
    CHECK(rep.carina.fn == 1);
    CHECK(rep.carina.tp == 5);
    CHECK(rep.carina.rates.recall == 5.0 / 6.0);
    CHECK(rep.carina.rates.precision == 1.0);
    CHECK(rep.distance.n == 5);
    CHECK(rep.confusion.total() == 6);
  }
  SUBCASE("alignment errors name the offenders") {
    const auto a = vertical_case("a", 100, 200, 0.5);
    const auto b = vertical_case("b", 100, 200, 0.5);
    const auto ra = result_for("a", std::nullopt, std::nullopt, 0.5);
    const auto rc = result_for("c", std::nullopt, std::nullopt, 0.5);
    try {
      evaluate({a, b}, {ra, rc, ra});
      FAIL("expected UnmatchedImages");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnmatchedImages);
      const std::string what = e.what();
      CHECK(what.find("b (no extraction record)") != std::string::npos);
      CHECK(what.find("c (no annotation)") != std::string::npos);
      CHECK(what.find("a (duplicate)") != std::string::npos);
    }
  }
  SUBCASE("dice joins the criterion when masks are given") {
    const auto gt = vertical_case("a", 100, 200, 0.5);
    // Tip 150 px away fails the point rule; a perfect mask rescues it.
    const auto r = result_for("a", shifted(derive_mp(gt), 150), carina_gt_point(gt), 0.5);
    const std::vector<GroundTruthAnnotation> gts{gt};
    const std::vector<ExtractionResult> rs{r};
    CHECK(evaluate(gts, rs).tip.fp == 1);
    std::map<std::string, PredictedMasks> masks;
    masks["a"].tube = gt_masks(gt).tube;
    const EvaluationReport rep = evaluate(gts, rs, masks);
    CHECK(rep.images[0].tip.dice == 1.0);
    CHECK(rep.tip.tp == 1);
    CHECK_FALSE(rep.images[0].carina.dice);
    masks["a"].tube = BinaryMask(5, 5);
    CHECK(code_of([&] { evaluate(gts, rs, masks); }) == ErrorCode::kDimensionMismatch);
  }
}


TEST_CASE("50-image cohort matches the manifest tally") {
  fixtures::ErrorProfile profile;
  profile.carina_errors_mm = {0.0, 0.5, 1.0, 2.5};
  profile.undetected_every = 7;
  profile.outlier_every = 11;
  const fixtures::Cohort cohort = fixtures::generate_cohort(50, 2026, profile);
  const auto results = extract_all(cohort.detections, [&] {
    std::vector<double> s;
    for (const auto& a : cohort.annotations) s.push_back(a.pixel_spacing_mm);
    return s;
  }(), {}, 0);
  const EvaluationReport rep = evaluate(cohort.annotations, results);
  const oracle::ManifestAggregates want = oracle::tally_manifest(cohort.manifest);

  CHECK(rep.tip.tp == want.tip_tp);
  CHECK(rep.tip.fp == want.tip_fp);
  CHECK(rep.tip.fn == want.tip_fn);
  CHECK(rep.carina.tp == want.car_tp);
  CHECK(rep.carina.fp == want.car_fp);
  CHECK(rep.carina.fn == want.car_fn);
  CHECK(*rep.tip.rates.recall ==
        static_cast<double>(want.tip_tp) / static_cast<double>(want.tip_tp + want.tip_fn));
  CHECK(*rep.carina.rates.precision == 1.0);

  using boost::math::statistics::mean;
  using boost::math::statistics::sample_variance;
  CHECK(*rep.tip.error.mean_mm == doctest::Approx(mean(want.tip_err)).epsilon(1e-12));
  CHECK(*rep.tip.error.std_mm ==
        doctest::Approx(std::sqrt(sample_variance(want.tip_err))).epsilon(1e-12));
  CHECK(*rep.carina.error.mean_mm == doctest::Approx(mean(want.car_err)).epsilon(1e-12));
  CHECK(*rep.carina.error.std_mm ==
        doctest::Approx(std::sqrt(sample_variance(want.car_err))).epsilon(1e-12));
  CHECK(*rep.distance.mean_mm == doctest::Approx(mean(want.dist_err)).epsilon(1e-12));
  CHECK(*rep.distance.std_mm ==
        doctest::Approx(std::sqrt(sample_variance(want.dist_err))).epsilon(1e-12));
  CHECK(*rep.tip.error.buckets == oracle::count_buckets(want.tip_err));
  CHECK(*rep.carina.error.buckets == oracle::count_buckets(want.car_err));
  CHECK(*rep.distance.buckets == oracle::count_buckets(want.dist_err));
  CHECK(rep.confusion.cells == want.cells);
  CHECK(rep.confusion.without_gt_distance == 0);
  CHECK(rep.confusion.total() == 50);
  CHECK(rep.pearson.n_pairs == want.pairs);
  CHECK(rep.pearson.n_pairs < rep.pearson.n_total);

  // Row and column totals.
  std::size_t col0 = 0;
  std::size_t col1 = 0;
  for (const auto& row : rep.confusion.cells) {
    col0 += row[0];
    col1 += row[1];
  }
  CHECK(col0 + col1 == 50);
  CHECK(rep.confusion.cells[2][0] + rep.confusion.cells[2][1] == 7);

  // Per-image points match the manifest.
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].tip_point == cohort.manifest[i].pred_tip);
    CHECK(results[i].carina_point == cohort.manifest[i].pred_carina);
    if (results[i].distance_mm) CHECK(*results[i].distance_mm == *cohort.manifest[i].d2_mm);
  }
}

TEST_CASE("all-perfect cohort") {
  fixtures::ErrorProfile profile;
  profile.tip_errors_mm = {0.0};
  const auto cohort = fixtures::generate_cohort(12, 5, profile);
  std::vector<double> s;
  for (const auto& a : cohort.annotations) s.push_back(a.pixel_spacing_mm);
  const EvaluationReport rep = evaluate(cohort.annotations, extract_all(cohort.detections, s, {}, 1));
  CHECK(rep.tip.rates.recall == 1.0);
  CHECK(rep.tip.rates.precision == 1.0);
  CHECK(rep.carina.rates.recall == 1.0);
  CHECK(rep.carina.rates.precision == 1.0);
  CHECK(rep.distance.mean_mm == 0.0);
  CHECK(rep.pearson.stats->r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("predicted masks take the top-scoring detection") {
  BinaryMask lo(4, 4);
  lo.set(0, 0);
  BinaryMask hi(4, 4);
  hi.set(3, 3);
  const DetectionSet set{"a",
                         {{DetectionClass::kTube, 0.2, lo, std::nullopt},
                          {DetectionClass::kTube, 0.7, hi, std::nullopt}}};
  const auto m = predicted_masks({set});
  CHECK(*m.at("a").tube == hi);
  CHECK_FALSE(m.at("a").carina);
}
