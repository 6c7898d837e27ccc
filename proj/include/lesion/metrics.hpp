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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lesion/category.hpp"
#include "lesion/datamodel.hpp"

namespace lesion {

/// 0/1 per item.
using BinaryLabels = std::vector<std::uint8_t>;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  /// Items with score >= threshold are called positive; +inf for (0, 0).
  double threshold = 0.0;
};

/// Points from (0, 0) to (1, 1), one per distinct score, thresholds strictly
/// decreasing.
struct RocCurve {
  std::vector<RocPoint> points;
};

/// Threshold sweep over the distinct scores, tied scores entering together.
/// Requires at least one positive and one negative label.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

/// Area under the curve over the part of the FPR axis where the sensitivity
/// is at least min_tpr: the integral of TPR from f0 to 1, where f0 is the
/// FPR at which the curve (linearly interpolated) first reaches min_tpr.
/// Unnormalized, so a perfect classifier scores 1 and chance scores
/// (1 - min_tpr^2) / 2.
double auc_above_sensitivity(const RocCurve& curve, double min_tpr = 0.8);

/// Area under the interpolated precision-recall curve: operating points are
/// taken at every distinct score, precision at a recall level is the maximum
/// precision at any equal or higher recall, and the area is the sum of recall
/// increments times that precision. Requires at least one positive.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct BinaryMetrics {
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double dice = 0.0;
  double ppv = 0.0;
  double npv = 0.0;
};

/// Accuracy is computed as sensitivity * prevalence + specificity *
/// (1 - prevalence). Empty denominators: sensitivity, specificity and dice
/// become 0, ppv and npv become 1, accuracy of an empty table is 0.
BinaryMetrics binary_metrics(const ConfusionCounts& c);

struct Binarized {
  BinaryLabels predicted;
  ConfusionCounts counts;
};

inline constexpr double kDecisionThreshold = 0.5;

/// One-vs-rest decision for `category`: positive iff confidence >= threshold.
/// preds and truth must be aligned (same ids, same order).
Binarized binarize(const PredictionSet& preds, const GroundTruthSet& truth, Category category,
                   double threshold = kDecisionThreshold);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);

struct BalancedAccuracy {
  double value = 0.0;
  /// Categories absent from the truth; they are left out of the mean.
  std::vector<Category> absent;
};

/// Mean per-class recall under the argmax decision. preds and truth must be
/// aligned. Throws on empty input.
BalancedAccuracy balanced_accuracy(const PredictionSet& preds, const GroundTruthSet& truth);

/// One-vs-rest scores and labels for a category, from aligned sets.
std::vector<double> category_scores(const PredictionSet& preds, Category category);
BinaryLabels category_labels(const GroundTruthSet& truth, Category category);

}  // namespace lesion
