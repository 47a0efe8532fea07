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

#include "ettc/commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "ettc/annotation_io.hpp"
#include "ettc/error.hpp"
#include "ettc/extraction.hpp"
#include "ettc/fixtures.hpp"
#include "ettc/image_io.hpp"
#include "ettc/parallel.hpp"
#include "ettc/render.hpp"
#include "ettc/report.hpp"

namespace ettc {

namespace fs = std::filesystem;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kExtract: return "extract";
    case Command::kEvaluate: return "evaluate";
    case Command::kGenFixtures: return "gen-fixtures";
    case Command::kRender: return "render";
  }
  return "extract";
}

void RunConfig::validate() const {
  if (!(fusion_threshold_px > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fusion threshold must be > 0");
  }
  if (!(range.low_mm < range.high_mm)) {
    throw Error(ErrorCode::kInvalidArgument, "suitable range needs low < high");
  }
  if (pixel_spacing_mm && !(*pixel_spacing_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel spacing must be > 0");
  }
}

namespace {

void require_path(const fs::path& p, const char* flag) {
  if (p.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(flag) + " is required");
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir.string() + ": cannot create output directory");
  }
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::vector<GroundTruthAnnotation> load_ground_truth(const RunConfig& config) {
  require_path(config.annotations, "--annotations");
  auto gt = load_annotations(config.annotations);
  if (config.pixel_spacing_mm) {
    for (auto& a : gt) a.pixel_spacing_mm = *config.pixel_spacing_mm;
  }
  std::sort(gt.begin(), gt.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  for (std::size_t i = 1; i < gt.size(); ++i) {
    if (gt[i].image_id == gt[i - 1].image_id) {
      throw Error(ErrorCode::kUnmatchedImages,
                  config.annotations.string() + ": duplicate image_id '" + gt[i].image_id + "'");
    }
  }
  return gt;
}

// One record per annotated image, in annotation (image_id) order.
std::vector<ExtractionResult> extract_for(const RunConfig& config,
                                          const std::vector<GroundTruthAnnotation>& gt,
                                          const std::vector<DetectionSet>& sets) {
  std::map<std::string, const DetectionSet*> by_id;
  for (const auto& s : sets) by_id.emplace(s.image_id, &s);
  std::set<std::string> known;
  for (const auto& a : gt) known.insert(a.image_id);
  for (const auto& s : sets) {
    if (!known.contains(s.image_id)) {
      throw Error(ErrorCode::kUnmatchedImages, config.detections.string() +
                                                   ": detection references unknown image_id '" +
                                                   s.image_id + "'");
    }
  }
  std::vector<DetectionSet> ordered;
  std::vector<double> spacings;
  ordered.reserve(gt.size());
  for (const auto& a : gt) {
    const auto it = by_id.find(a.image_id);
    ordered.push_back(it != by_id.end() ? *it->second : DetectionSet{a.image_id, {}});
    spacings.push_back(a.pixel_spacing_mm);
  }
  ExtractionOptions options;
  options.fusion_threshold_px = config.fusion_threshold_px;
  return extract_all(ordered, spacings, options, config.jobs);
}

std::vector<DetectionSet> load_dets(const RunConfig& config,
                                    const std::vector<GroundTruthAnnotation>& gt) {
  return load_detections(config.detections, image_sizes(gt));
}

}  // namespace

void run_extract(const RunConfig& config) {
  config.validate();
  require_path(config.detections, "--detections");
  const auto gt = load_ground_truth(config);
  const auto results = extract_for(config, gt, load_dets(config, gt));
  prepare_out_dir(config.out);
  write_text_file(config.out / kExtractionFile, dump(records_to_json(results)));
  spdlog::info("extract: {} images -> {}", results.size(),
               (config.out / kExtractionFile).string());
}

void run_evaluate(const RunConfig& config) {
  config.validate();
  const auto gt = load_ground_truth(config);
  if (config.records.empty() && config.detections.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluate needs --records or --detections");
  }
  std::vector<DetectionSet> sets;
  if (!config.detections.empty()) sets = load_dets(config, gt);
  const std::vector<ExtractionResult> results =
      config.records.empty() ? extract_for(config, gt, sets) : load_records(config.records);

  EvaluationOptions options;
  options.range = config.range;
  options.jobs = config.jobs;
  const EvaluationReport report = evaluate(gt, results, predicted_masks(sets), options);

  prepare_out_dir(config.out);
  write_text_file(config.out / kReportJsonFile, dump(report_to_json(report)));
  write_text_file(config.out / kReportTextFile, report_tables(report));
  write_text_file(config.out / kPerImageCsvFile, per_image_csv(report));
  spdlog::info("evaluate: {} images, {} distance pairs -> {}", report.images.size(),
               report.pearson.n_pairs, config.out.string());
}

void run_gen_fixtures(const RunConfig& config) {
  config.validate();
  fixtures::ErrorProfile profile;
  profile.undetected_every = config.undetected_every;
  profile.outlier_every = config.outlier_every;
  if (config.pixel_spacing_mm) profile.pixel_spacings_mm = {*config.pixel_spacing_mm};
  const fixtures::Cohort cohort = fixtures::generate_cohort(config.count, config.seed, profile);
  prepare_out_dir(config.out);
  save_annotations(config.out / kAnnotationsFile, cohort.annotations);
  save_detections(config.out / kDetectionsFile, cohort.detections);
  write_text_file(config.out / kManifestFile, dump(fixtures::manifest_to_json(cohort)));
  spdlog::info("gen-fixtures: {} images (seed {}) -> {}", cohort.annotations.size(), config.seed,
               config.out.string());
}

void run_render(const RunConfig& config) {
  config.validate();
  const auto gt = load_ground_truth(config);
  std::vector<ExtractionResult> results;
  if (!config.records.empty()) {
    results = load_records(config.records);
  } else if (!config.detections.empty()) {
    results = extract_for(config, gt, load_dets(config, gt));
  }
  std::map<std::string, const ExtractionResult*> by_id;
  for (const auto& r : results) by_id.emplace(r.image_id, &r);
  std::set<std::string> known;
  for (const auto& a : gt) known.insert(a.image_id);
  for (const auto& r : results) {
    if (!known.contains(r.image_id)) {
      throw Error(ErrorCode::kUnmatchedImages,
                  "extraction record references unknown image_id '" + r.image_id + "'");
    }
  }
  prepare_out_dir(config.out);
  std::mutex write_mutex;
  parallel_for(gt.size(), config.jobs, [&](std::size_t i) {
    const GroundTruthAnnotation& a = gt[i];
    std::optional<RgbImage> background;
    if (!config.backgrounds.empty()) {
      const fs::path bg = config.backgrounds / (a.image_id + ".png");
      if (fs::exists(bg)) background = read_rgb_png(bg);
    }
    const auto it = by_id.find(a.image_id);
    const Overlay overlay = render_overlay(a, it != by_id.end() ? it->second : nullptr,
                                           background ? &*background : nullptr);
    std::lock_guard lock(write_mutex);
    write_rgb_png(config.out / (a.image_id + ".png"), overlay.image, overlay.legend);
  });
  spdlog::info("render: {} overlays -> {}", gt.size(), config.out.string());
}

void run(const RunConfig& config) {
  switch (config.command) {
    case Command::kExtract: return run_extract(config);
    case Command::kEvaluate: return run_evaluate(config);
    case Command::kGenFixtures: return run_gen_fixtures(config);
    case Command::kRender: return run_render(config);
  }
}

}  // namespace ettc
