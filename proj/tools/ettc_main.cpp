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

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ettc/commands.hpp"
#include "ettc/error.hpp"

namespace {

// sysexits EX_USAGE: bad flags or missing input files.
constexpr int kUsageExit = 64;

// ETTC_LOG_LEVEL takes spdlog level names (trace, debug, info, warn, error,
// critical, off). The default is warn so that normal runs are quiet.
void configure_logging(const std::string& flag_level) {
  auto logger = spdlog::stderr_color_mt("ettc");
  spdlog::set_default_logger(logger);
  std::string level = "warn";
  if (const char* env = std::getenv("ETTC_LOG_LEVEL")) level = env;
  if (!flag_level.empty()) level = flag_level;
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ETT tip / carina feature-point extraction and evaluation"};
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level, "Overrides ETTC_LOG_LEVEL");

  ettc::RunConfig config;
  std::vector<double> range{config.range.low_mm, config.range.high_mm};
  double spacing = 0.0;

  auto common_out = [&](CLI::App* sub) {
    sub->add_option("--out", config.out, "Output directory")->required();
    sub->add_option("--jobs", config.jobs, "Worker threads (0 = all cores)");
  };
  auto spacing_opt = [&](CLI::App* sub) {
    sub->add_option("--pixel-spacing", spacing, "Pixel spacing override in mm")
        ->check(CLI::PositiveNumber);
  };

  auto* extract = app.add_subcommand("extract", "Fuse detections into tip/carina points");
  extract->add_option("--detections", config.detections)->required()->check(CLI::ExistingFile);
  extract->add_option("--annotations", config.annotations)->required()->check(CLI::ExistingFile);
  extract->add_option("--fusion-threshold", config.fusion_threshold_px,
                      "Carina box/mask fusion distance in px");
  spacing_opt(extract);
  common_out(extract);

  auto* evaluate = app.add_subcommand("evaluate", "Score extraction records against labels");
  evaluate->add_option("--annotations", config.annotations)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--records", config.records, "Extraction records from `extract`")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--detections", config.detections, "Detections (enables Dice)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--fusion-threshold", config.fusion_threshold_px);
  evaluate->add_option("--suitable-range", range, "lo,hi in mm")->delimiter(',')->expected(2);
  spacing_opt(evaluate);
  common_out(evaluate);

  auto* gen = app.add_subcommand("gen-fixtures", "Write a synthetic cohort with a manifest");
  gen->add_option("--seed", config.seed);
  gen->add_option("--count", config.count)->check(CLI::PositiveNumber);
  gen->add_option("--undetected-every", config.undetected_every);
  gen->add_option("--outlier-every", config.outlier_every);
  spacing_opt(gen);
  common_out(gen);

  auto* render = app.add_subcommand("render", "Draw label and prediction overlays");
  render->add_option("--annotations", config.annotations)->required()->check(CLI::ExistingFile);
  render->add_option("--records", config.records)->check(CLI::ExistingFile);
  render->add_option("--detections", config.detections)->check(CLI::ExistingFile);
  render->add_option("--backgrounds", config.backgrounds, "Directory of <image_id>.png")
      ->check(CLI::ExistingDirectory);
  render->add_option("--fusion-threshold", config.fusion_threshold_px);
  common_out(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  if (app.got_subcommand(extract)) config.command = ettc::Command::kExtract;
  if (app.got_subcommand(evaluate)) config.command = ettc::Command::kEvaluate;
  if (app.got_subcommand(gen)) config.command = ettc::Command::kGenFixtures;
  if (app.got_subcommand(render)) config.command = ettc::Command::kRender;
  config.range = {range[0], range[1]};
  if (spacing > 0.0) config.pixel_spacing_mm = spacing;

  try {
    configure_logging(log_level);
    spdlog::debug("command {}", ettc::to_string(config.command));
    ettc::run(config);
  } catch (const ettc::Error& e) {
    std::fprintf(stderr, "ettc %s: %s\n", app.get_subcommands().front()->get_name().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ettc: unexpected failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
