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

#include <string>

#include <nlohmann/json.hpp>

#include "ettc/metrics.hpp"

namespace ettc {

nlohmann::json report_to_json(const EvaluationReport& report);

/// Plain-text tables: recall/precision, object error, distance error, the
/// three error distributions, the diagnosis confusion matrix and the Pearson
/// correlation block.
std::string report_tables(const EvaluationReport& report, const std::string& label = "All");

/// One row per image: image_id, dice_tip, dice_carina, err_tip_mm,
/// err_carina_mm, d1_mm, d2_mm, abs_d1_d2_mm, suitability_gt, suitability_pred.
std::string per_image_csv(const EvaluationReport& report);

/// Significance stars: "****" for p < 1e-4 through "ns" for p >= 0.05.
std::string p_value_summary(double p);

}  // namespace ettc
