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

#include "lesion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lesion/error.hpp"

namespace lesion {
namespace {

void require_aligned(const PredictionSet& preds, const GroundTruthSet& truth) {
  if (preds.ids() != truth.ids()) throw Error("predictions and ground truth are not aligned");
  if (preds.num_classes() != kNumCategories) throw Error("scoring needs 9-class predictions");
}

struct Sweep {
  // Cumulative counts after admitting each distinct-score group, highest first.
  std::vector<double> threshold;
  std::vector<std::int64_t> tp;
  std::vector<std::int64_t> fp;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

Sweep sweep(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Sweep s;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (!std::isfinite(scores[i])) throw Error("non-finite score");
    (labels[i] != 0 ? tp : fp) += 1;
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[i]) {
      s.threshold.push_back(scores[i]);
      s.tp.push_back(tp);
      s.fp.push_back(fp);
    }
  }
  s.positives = tp;
  s.negatives = fp;
  return s;
}

double ratio_or(std::int64_t num, std::int64_t den, double fallback) {
  return den == 0 ? fallback : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const Sweep s = sweep(scores, labels);
  if (s.positives == 0 || s.negatives == 0) {
    throw Error("ROC curve needs at least one positive and one negative label");
  }
  RocCurve curve;
  curve.points.reserve(s.threshold.size() + 1);
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  for (std::size_t g = 0; g < s.threshold.size(); ++g) {
    curve.points.push_back({static_cast<double>(s.fp[g]) / static_cast<double>(s.negatives),
                            static_cast<double>(s.tp[g]) / static_cast<double>(s.positives),
                            s.threshold[g]});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double auc_above_sensitivity(const RocCurve& curve, double min_tpr) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0.0;
  if (min_tpr <= pts.front().tpr) return auc(curve);
  std::size_t i = 1;
  while (i < pts.size() && pts[i].tpr < min_tpr) ++i;
  if (i == pts.size()) return 0.0;
  const auto& a = pts[i - 1];
  const auto& b = pts[i];
  // FPR where the segment a-b crosses min_tpr.
  const double f0 = a.fpr + (b.fpr - a.fpr) * (min_tpr - a.tpr) / (b.tpr - a.tpr);
  double area = (b.fpr - f0) * (min_tpr + b.tpr) / 2.0;
  for (std::size_t j = i + 1; j < pts.size(); ++j) {
    area += (pts[j].fpr - pts[j - 1].fpr) * (pts[j - 1].tpr + pts[j].tpr) / 2.0;
  }
  return area;
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const Sweep s = sweep(scores, labels);
  if (s.positives == 0) throw Error("average precision needs at least one positive label");
  const std::size_t n = s.threshold.size();
  std::vector<double> precision(n);
  for (std::size_t g = 0; g < n; ++g) {
    precision[g] = static_cast<double>(s.tp[g]) / static_cast<double>(s.tp[g] + s.fp[g]);
  }
  // Recall never decreases along the sweep, so a running maximum from the
  // end gives the best precision at equal or higher recall.
  for (std::size_t g = n; g-- > 1;) precision[g - 1] = std::max(precision[g - 1], precision[g]);
  double ap = 0.0;
  std::int64_t prev_tp = 0;
  for (std::size_t g = 0; g < n; ++g) {
    if (s.tp[g] != prev_tp) {
      ap += static_cast<double>(s.tp[g] - prev_tp) / static_cast<double>(s.positives) * precision[g];
      prev_tp = s.tp[g];
    }
  }
  return ap;
}

BinaryMetrics binary_metrics(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) throw Error("confusion counts must be >= 0");
  BinaryMetrics m;
  m.sensitivity = ratio_or(c.tp, c.tp + c.fn, 0.0);
  m.specificity = ratio_or(c.tn, c.tn + c.fp, 0.0);
  m.ppv = ratio_or(c.tp, c.tp + c.fp, 1.0);
  m.npv = ratio_or(c.tn, c.tn + c.fn, 1.0);
  m.dice = ratio_or(2 * c.tp, 2 * c.tp + c.fp + c.fn, 0.0);
  const std::int64_t total = c.total();
  if (total > 0) {
    const double prevalence = static_cast<double>(c.tp + c.fn) / static_cast<double>(total);
    m.accuracy = m.sensitivity * prevalence + m.specificity * (1.0 - prevalence);
  }
  return m;
}

Binarized binarize(const PredictionSet& preds, const GroundTruthSet& truth, Category category,
                   double threshold) {
  require_aligned(preds, truth);
  const std::size_t c = index_of(category);
  Binarized out;
  out.predicted.resize(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool predicted = preds.at(i, c) >= threshold;
    const bool actual = truth.label(i) == category;
    out.predicted[i] = predicted ? 1 : 0;
    if (predicted && actual) ++out.counts.tp;
    else if (predicted) ++out.counts.fp;
    else if (actual) ++out.counts.fn;
    else ++out.counts.tn;
  }
  return out;
}

std::size_t argmax(std::span<const double> row) {
  if (row.empty()) throw Error("argmax of an empty row");
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

BalancedAccuracy balanced_accuracy(const PredictionSet& preds, const GroundTruthSet& truth) {
  require_aligned(preds, truth);
  if (truth.empty()) throw Error("balanced accuracy of an empty set");
  std::vector<std::int64_t> hits(kNumCategories, 0);
  std::vector<std::int64_t> support(kNumCategories, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t actual = index_of(truth.label(i));
    ++support[actual];
    if (argmax(preds.row(i)) == actual) ++hits[actual];
  }
  BalancedAccuracy out;
  double sum = 0.0;
  int present = 0;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (support[c] == 0) {
      out.absent.push_back(kAllCategories[c]);
      continue;
    }
    sum += static_cast<double>(hits[c]) / static_cast<double>(support[c]);
    ++present;
  }
  out.value = sum / present;
  return out;
}

std::vector<double> category_scores(const PredictionSet& preds, Category category) {
  std::vector<double> s(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) s[i] = preds.at(i, index_of(category));
  return s;
}

BinaryLabels category_labels(const GroundTruthSet& truth, Category category) {
  BinaryLabels l(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) l[i] = truth.label(i) == category ? 1 : 0;
  return l;
}

}  // namespace lesion
