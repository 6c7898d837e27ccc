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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lesion/category.hpp"
#include "lesion/datamodel.hpp"
#include "lesion/metrics.hpp"

namespace lesion {

/// Rows of the evaluation table, in display order.
enum class Metric : std::uint8_t {
  auc,
  auc_sens80,
  avg_precision,
  accuracy,
  sensitivity,
  specificity,
  dice,
  ppv,
  npv,
};

inline constexpr std::size_t kNumMetrics = 9;

inline constexpr std::array<Metric, kNumMetrics> kAllMetrics = {
    Metric::auc,         Metric::auc_sens80,  Metric::avg_precision,
    Metric::accuracy,    Metric::sensitivity, Metric::specificity,
    Metric::dice,        Metric::ppv,         Metric::npv};

/// Machine-readable key, e.g. "auc_sens80".
std::string_view metric_key(Metric m);
/// Human-readable row label, e.g. "AUC, Sens>80%".
std::string_view metric_label(Metric m);

inline constexpr double kPartialAucMinTpr = 0.8;

struct MetricsReport {
  /// cells[metric][category]; empty where the metric is undefined (AUC and
  /// AP for a category with no positives, AUC for one with no negatives).
  std::array<std::array<std::optional<double>, kNumCategories>, kNumMetrics> cells{};
  /// Arithmetic mean over the defined category cells of each row.
  std::array<std::optional<double>, kNumMetrics> mean{};
  double balanced_accuracy = 0.0;
  std::size_t num_items = 0;
  /// Categories with no positive items in the truth.
  std::vector<Category> absent_categories;
  /// Training class counts the predictions were produced under, if given.
  std::optional<ClassCounts> training_counts;

  std::optional<double> get(Metric m, Category c) const {
    return cells[static_cast<std::size_t>(m)][index_of(c)];
  }
};

/// Mean of the defined values; nullopt if none are defined.
std::optional<double> mean_column(std::span<const std::optional<double>> values);

/// One-vs-rest metrics for every category, their row means and the balanced
/// multiclass accuracy. Binary metrics use the fixed 0.5 decision threshold;
/// balanced accuracy uses argmax. preds and truth must be aligned.
MetricsReport full_report(const PredictionSet& preds, const GroundTruthSet& truth,
                          const std::optional<ClassCounts>& training_counts = std::nullopt);

/// `key=value` lines: `<metric>.<CATEGORY>`, `<metric>.mean`,
/// `balanced_accuracy`, `items`, `absent`, and `prior.<CATEGORY>` when
/// training counts are present. Values use round-trip formatting; undefined
/// cells are written as `null`.
std::string format_report_key_values(const MetricsReport& report);

/// Aligned text table: one row per metric, columns Mean then the nine
/// categories, three decimals.
std::string format_report_table(const MetricsReport& report);

}  // namespace lesion
