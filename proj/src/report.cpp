// Copyright 2026 The Lesion Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lesion/report.hpp"

#include <cstdio>

#include "lesion/error.hpp"

namespace lesion {

std::string_view metric_key(Metric m) {
  switch (m) {
    case Metric::auc: return "auc";
    case Metric::auc_sens80: return "auc_sens80";
    case Metric::avg_precision: return "avg_precision";
    case Metric::accuracy: return "accuracy";
    case Metric::sensitivity: return "sensitivity";
    case Metric::specificity: return "specificity";
    case Metric::dice: return "dice";
    case Metric::ppv: return "ppv";
    case Metric::npv: return "npv";
  }
  return "?";
}

std::string_view metric_label(Metric m) {
  switch (m) {
    case Metric::auc: return "AUC";
    case Metric::auc_sens80: return "AUC, Sens>80%";
    case Metric::avg_precision: return "Avg. Precision";
    case Metric::accuracy: return "Accuracy";
    case Metric::sensitivity: return "Sensitivity";
    case Metric::specificity: return "Specificity";
    case Metric::dice: return "Dice Coeff";
    case Metric::ppv: return "PPV";
    case Metric::npv: return "NPV";
  }
  return "?";
}

std::optional<double> mean_column(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

MetricsReport full_report(const PredictionSet& preds, const GroundTruthSet& truth,
                          const std::optional<ClassCounts>& training_counts) {
  if (truth.empty()) throw Error("cannot score an empty set");
  if (training_counts && training_counts->counts.size() != kNumCategories) {
    throw Error("training counts must have 9 entries");
  }
  MetricsReport report;
  report.num_items = truth.size();
  report.training_counts = training_counts;

  auto set = [&report](Metric m, Category c, std::optional<double> v) {
    report.cells[static_cast<std::size_t>(m)][index_of(c)] = v;
  };
  for (Category cat : kAllCategories) {
    const auto scores = category_scores(preds, cat);
    const auto labels = category_labels(truth, cat);
    std::size_t positives = 0;
    for (auto l : labels) positives += l;
    const bool has_positive = positives > 0;
    const bool has_negative = positives < labels.size();
    if (!has_positive) report.absent_categories.push_back(cat);

    if (has_positive && has_negative) {
      const RocCurve curve = roc_curve(scores, labels);
      set(Metric::auc, cat, auc(curve));
      set(Metric::auc_sens80, cat, auc_above_sensitivity(curve, kPartialAucMinTpr));
    }
    if (has_positive) set(Metric::avg_precision, cat, average_precision(scores, labels));

    const BinaryMetrics bm = binary_metrics(binarize(preds, truth, cat).counts);
    set(Metric::accuracy, cat, bm.accuracy);
    set(Metric::sensitivity, cat, bm.sensitivity);
    set(Metric::specificity, cat, bm.specificity);
    set(Metric::dice, cat, bm.dice);
    set(Metric::ppv, cat, bm.ppv);
    set(Metric::npv, cat, bm.npv);
  }
  for (std::size_t m = 0; m < kNumMetrics; ++m) report.mean[m] = mean_column(report.cells[m]);
  report.balanced_accuracy = balanced_accuracy(preds, truth).value;
  return report;
}

std::string format_report_key_values(const MetricsReport& report) {
  auto value = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("null"); };
  std::string out;
  out += "items=" + std::to_string(report.num_items) + "\n";
  out += "balanced_accuracy=" + format_double(report.balanced_accuracy) + "\n";
  for (Metric m : kAllMetrics) {
    const auto row = static_cast<std::size_t>(m);
    const std::string key(metric_key(m));
    out += key + ".mean=" + value(report.mean[row]) + "\n";
    for (Category c : kAllCategories) {
      out += key + "." + std::string(to_string(c)) + "=" + value(report.cells[row][index_of(c)]) + "\n";
    }
  }
  out += "absent=";
  for (std::size_t i = 0; i < report.absent_categories.size(); ++i) {
    if (i) out += ',';
    out += to_string(report.absent_categories[i]);
  }
  out += "\n";
  if (report.training_counts) {
    const auto priors = report.training_counts->priors();
    for (Category c : kAllCategories) {
      out += "prior." + std::string(to_string(c)) + "=" + format_double(priors[index_of(c)]) + "\n";
    }
  }
  return out;
}

std::string format_report_table(const MetricsReport& report) {
  auto cell = [](const std::optional<double>& v) {
    char buf[16];
    if (!v) return std::string("    -");
    std::snprintf(buf, sizeof(buf), "%5.3f", *v);
    return std::string(buf);
  };
  char line[64];
  std::string out;
  std::snprintf(line, sizeof(line), "%-15s %5s", "Metric", "Mean");
  out += line;
  for (auto name : kCategoryNames) {
    std::snprintf(line, sizeof(line), " %5s", std::string(name).c_str());
    out += line;
  }
  out += "\n";
  for (Metric m : kAllMetrics) {
    const auto row = static_cast<std::size_t>(m);
    std::snprintf(line, sizeof(line), "%-15s", std::string(metric_label(m)).c_str());
    out += line;
    out += " " + cell(report.mean[row]);
    for (std::size_t c = 0; c < kNumCategories; ++c) out += " " + cell(report.cells[row][c]);
    out += "\n";
  }
  std::snprintf(line, sizeof(line), "%-15s %5.3f\n", "Balanced Acc.", report.balanced_accuracy);
  out += line;
  return out;
}

}  // namespace lesion
