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

#include "ettc/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <vector>

namespace ettc {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

json error_json(const ErrorSummary& s) {
  return {{"n", s.n},
          {"mean_mm", opt(s.mean_mm)},
          {"std_mm", opt(s.std_mm)},
          {"buckets", s.buckets ? json(*s.buckets) : json(nullptr)}};
}

json class_json(const ClassSummary& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"recall", opt(c.rates.recall)},
          {"precision", opt(c.rates.precision)},
          {"object_error", error_json(c.error)}};
}

json outcome_json(const ObjectOutcome& o) {
  return {{"gt_present", o.gt_present}, {"pred_present", o.pred_present},
          {"dice", opt(o.dice)},        {"error_px", opt(o.error_px)},
          {"error_mm", opt(o.error_mm)}, {"tp", o.flags.tp},
          {"fp", o.flags.fp},           {"fn", o.flags.fn}};
}

using Row = std::vector<std::string>;

std::string grid(const std::string& title, const std::vector<Row>& header,
                 const std::vector<Row>& body) {
  std::size_t cols = 0;
  for (const auto& r : header) cols = std::max(cols, r.size());
  for (const auto& r : body) cols = std::max(cols, r.size());
  std::vector<std::size_t> width(cols, 0);
  auto measure = [&](const std::vector<Row>& rows) {
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
  };
  measure(header);
  measure(body);

  std::string rule = "+";
  for (const std::size_t w : width) rule += std::string(w + 2, '-') + "+";
  rule += "\n";
  auto line = [&](const Row& r, bool left_first) {
    std::string s = "|";
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = c < r.size() ? r[c] : "";
      if (c == 0 && left_first) {
        s += fmt::format(" {:<{}} |", cell, width[c]);
      } else {
        s += fmt::format(" {:>{}} |", cell, width[c]);
      }
    }
    return s + "\n";
  };

  std::string out = title + "\n" + rule;
  for (const auto& r : header) out += line(r, true);
  out += rule;
  for (const auto& r : body) out += line(r, true);
  out += rule;
  return out;
}

std::string pct(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}%", *v * 100.0) : std::string("n/a");
}

std::string mm(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
}

Row bucket_header(const std::vector<double>& thresholds) {
  Row r{""};
  for (const double t : thresholds) r.push_back(fmt::format("<= {:g} mm", t));
  return r;
}

Row bucket_row(const std::string& label, const ErrorSummary& s, std::size_t n_thresholds) {
  Row r{label};
  for (std::size_t i = 0; i < n_thresholds; ++i) {
    r.push_back(s.buckets ? pct((*s.buckets)[i]) : std::string("n/a"));
  }
  return r;
}

std::string csv_number(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

std::string p_value_summary(double p) {
  if (p < 0.0001) return "****";
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

json report_to_json(const EvaluationReport& report) {
  json images = json::array();
  for (const auto& ev : report.images) {
    images.push_back(
        {{"image_id", ev.image_id},
         {"tip", outcome_json(ev.tip)},
         {"carina", outcome_json(ev.carina)},
         {"d1_mm", opt(ev.d1_mm)},
         {"d2_mm", opt(ev.d2_mm)},
         {"distance_error_mm", opt(ev.distance_error_mm)},
         {"suitability_gt", ev.gt_suitability ? json(to_string(*ev.gt_suitability)) : json(nullptr)},
         {"suitability_pred", to_string(ev.pred_suitability)}});
  }
  const auto& cm = report.confusion.cells;
  json confusion = {
      {"columns", {"gt_suitable", "gt_unsuitable"}},
      {"suitable", {cm[0][0], cm[0][1]}},
      {"unsuitable", {cm[1][0], cm[1][1]}},
      {"undetection", {cm[2][0], cm[2][1]}},
      {"without_gt_distance", report.confusion.without_gt_distance},
  };
  json pearson = {{"n_pairs", report.pearson.n_pairs}, {"n_total", report.pearson.n_total}};
  if (report.pearson.stats) {
    const PearsonStats& s = *report.pearson.stats;
    pearson["r"] = s.r;
    pearson["r_squared"] = s.r_squared;
    pearson["ci95"] = {s.ci_low, s.ci_high};
    pearson["p_two_tailed"] = s.p_two_tailed;
    pearson["p_summary"] = p_value_summary(s.p_two_tailed);
    pearson["significant"] = s.p_two_tailed < 0.05;
  } else {
    pearson["unavailable"] = report.pearson.unavailable_reason;
  }
  return {{"bucket_thresholds_mm", report.bucket_thresholds_mm},
          {"tip", class_json(report.tip)},
          {"carina", class_json(report.carina)},
          {"distance_error", error_json(report.distance)},
          {"confusion_matrix", confusion},
          {"pearson", pearson},
          {"images", images}};
}

std::string report_tables(const EvaluationReport& report, const std::string& label) {
  std::string out;
  out += grid("Object detection performance in recall and precision",
              {{"", "Tip Recall", "Tip Precision", "Carina Recall", "Carina Precision"}},
              {{label, pct(report.tip.rates.recall), pct(report.tip.rates.precision),
                pct(report.carina.rates.recall), pct(report.carina.rates.precision)}});
  out += "\n";
  out += grid("Object detection performance in object error",
              {{"", "Tip Mean (mm)", "Tip Std. (mm)", "Carina Mean (mm)", "Carina Std. (mm)"}},
              {{label, mm(report.tip.error.mean_mm), mm(report.tip.error.std_mm),
                mm(report.carina.error.mean_mm), mm(report.carina.error.std_mm)}});
  out += "\n";
  out += grid("Object detection performance in ETT-carina distance error",
              {{"", "Mean (mm)", "Std. (mm)"}},
              {{label, mm(report.distance.mean_mm), mm(report.distance.std_mm)}});
  out += "\n";
  const auto& th = report.bucket_thresholds_mm;
  out += grid("Distribution of images in ETT-carina distance error", {bucket_header(th)},
              {bucket_row(label, report.distance, th.size())});
  out += "\n";
  out += grid("Distribution of images in object error (tube tip)", {bucket_header(th)},
              {bucket_row(label, report.tip.error, th.size())});
  out += "\n";
  out += grid("Distribution of images in object error (carina)", {bucket_header(th)},
              {bucket_row(label, report.carina.error, th.size())});
  out += "\n";

  const auto& cm = report.confusion.cells;
  auto n = [](std::size_t v) { return fmt::format("{}", v); };
  out += grid("Confusion matrix of diagnosis", {{"Predict \\ GT", "Suitable", "Unsuitable"}},
              {{"Suitable", n(cm[0][0]), n(cm[0][1])},
               {"Unsuitable", n(cm[1][0]), n(cm[1][1])},
               {"Undetection", n(cm[2][0]), n(cm[2][1])}});
  if (report.confusion.without_gt_distance > 0) {
    out += fmt::format("Images without a ground-truth distance: {}\n",
                       report.confusion.without_gt_distance);
  }
  out += "\n";

  std::vector<Row> body;
  const auto& pr = report.pearson;
  if (pr.stats) {
    const PearsonStats& s = *pr.stats;
    const bool tiny = s.p_two_tailed < 0.0001;
    body = {{"Pearson r", ""},
            {"r", fmt::format("{:.4f}", s.r)},
            {"95% confidence interval", fmt::format("{:.4f} to {:.4f}", s.ci_low, s.ci_high)},
            {"R square", fmt::format("{:.4f}", s.r_squared)},
            {"P value", ""},
            {"P (two-tailed)", tiny ? std::string("< 0.0001") : fmt::format("{:.4f}", s.p_two_tailed)},
            {"P value summary", p_value_summary(s.p_two_tailed)},
            {"Significant? (alpha=0.05)", s.p_two_tailed < 0.05 ? "Yes" : "No"}};
  } else {
    body = {{"Pearson r", "n/a"}, {"Reason", pr.unavailable_reason}};
  }
  body.push_back({"", ""});
  body.push_back({"Number of XY Pairs", n(pr.n_pairs)});
  body.push_back({"Overall number", n(pr.n_total)});
  out += grid("Correlation between ground truth and prediction (ETT-carina distance)",
              {{"", label}}, body);
  return out;
}

std::string per_image_csv(const EvaluationReport& report) {
  std::string out =
      "image_id,dice_tip,dice_carina,err_tip_mm,err_carina_mm,d1_mm,d2_mm,abs_d1_d2_mm,"
      "suitability_gt,suitability_pred\n";
  for (const auto& ev : report.images) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", ev.image_id, csv_number(ev.tip.dice),
                       csv_number(ev.carina.dice), csv_number(ev.tip.error_mm),
                       csv_number(ev.carina.error_mm), csv_number(ev.d1_mm),
                       csv_number(ev.d2_mm), csv_number(ev.distance_error_mm),
                       ev.gt_suitability ? to_string(*ev.gt_suitability) : std::string_view(""),
                       to_string(ev.pred_suitability));
  }
  return out;
}

}  // namespace ettc
