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

// Brute-force reference implementations used to check the library. They
// favour obviousness over speed and share no code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

struct Counts {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Mann-Whitney statistic: fraction of (positive, negative) pairs ranked
// correctly, ties worth one half.
inline double pair_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double good = 0;
  long long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      ++pairs;
      if (s[i] > s[j]) good += 1;
      else if (s[i] == s[j]) good += 0.5;
    }
  }
  return good / static_cast<double>(pairs);
}

inline Counts counts_at(const std::vector<double>& s, const std::vector<std::uint8_t>& y, double t) {
  Counts c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool pred = s[i] >= t;
    if (pred && y[i]) ++c.tp;
    else if (pred) ++c.fp;
    else if (y[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

// Every candidate threshold: +inf and each distinct score, descending.
inline std::vector<double> thresholds(const std::vector<double>& s) {
  std::set<double, std::greater<>> t(s.begin(), s.end());
  std::vector<double> out{std::numeric_limits<double>::infinity()};
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

struct Point {
  double fpr, tpr, threshold;
};

inline std::vector<Point> roc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  std::vector<Point> pts;
  for (double t : thresholds(s)) {
    const Counts c = counts_at(s, y, t);
    pts.push_back({double(c.fp) / double(c.fp + c.tn), double(c.tp) / double(c.tp + c.fn), t});
  }
  return pts;
}

// Exact integral of the piecewise-linear ROC over [f0, 1], f0 being the
// smallest FPR at which the interpolated curve reaches min_tpr.
inline double partial_auc(const std::vector<Point>& pts, double min_tpr) {
  double f0 = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].tpr >= min_tpr) {
      if (i == 0 || pts[i].fpr == pts[i - 1].fpr) {
        f0 = pts[i].fpr;
      } else {
        const Point& a = pts[i - 1];
        const Point& b = pts[i];
        f0 = a.fpr + (min_tpr - a.tpr) * (b.fpr - a.fpr) / (b.tpr - a.tpr);
      }
      break;
    }
  }
  auto tpr_at = [&](double x) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (x <= pts[i].fpr && pts[i].fpr > pts[i - 1].fpr) {
        const double w = (x - pts[i - 1].fpr) / (pts[i].fpr - pts[i - 1].fpr);
        return pts[i - 1].tpr + w * (pts[i].tpr - pts[i - 1].tpr);
      }
    }
    return pts.back().tpr;
  };
  // Split [f0, 1] at every vertex and integrate each linear piece.
  std::vector<double> xs{f0, 1.0};
  for (const auto& p : pts) {
    if (p.fpr > f0 && p.fpr < 1.0) xs.push_back(p.fpr);
  }
  std::sort(xs.begin(), xs.end());
  double area = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double a = xs[i - 1], b = xs[i];
    if (b <= a) continue;
    area += (b - a) * (tpr_at(a + (b - a) * 1e-12) + tpr_at(b)) / 2;
  }
  return area;
}

// Interpolated AP by exhaustive sweep: at each threshold's recall level use
// the best precision among all thresholds with at least that recall.
inline double average_precision(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  std::vector<std::pair<double, double>> rp;  // recall, precision
  for (double t : thresholds(s)) {
    const Counts c = counts_at(s, y, t);
    if (c.tp + c.fp == 0) continue;
    rp.emplace_back(double(c.tp) / double(c.tp + c.fn), double(c.tp) / double(c.tp + c.fp));
  }
  double ap = 0, prev_recall = 0;
  for (const auto& [r, p] : rp) {
    double best = 0;
    for (const auto& [r2, p2] : rp) {
      if (r2 >= r) best = std::max(best, p2);
    }
    ap += (r - prev_recall) * best;
    prev_recall = r;
  }
  return ap;
}

struct Metrics {
  double accuracy, sensitivity, specificity, dice, ppv, npv;
};

inline double ratio_or(long long num, long long den, double fallback) {
  return den == 0 ? fallback : double(num) / double(den);
}

inline Metrics metrics(const Counts& c) {
  const long long n = c.tp + c.fp + c.tn + c.fn;
  return {ratio_or(c.tp + c.tn, n, 0.0),          ratio_or(c.tp, c.tp + c.fn, 0.0),
          ratio_or(c.tn, c.tn + c.fp, 0.0),       ratio_or(2 * c.tp, 2 * c.tp + c.fp + c.fn, 0.0),
          ratio_or(c.tp, c.tp + c.fp, 1.0),       ratio_or(c.tn, c.tn + c.fn, 1.0)};
}

// Mean recall over the classes present in `truth`, argmax with ties to the
// lowest index.
inline double balanced_accuracy(const std::vector<std::vector<double>>& rows, const std::vector<int>& truth,
                                int classes) {
  std::vector<long long> hit(classes, 0), total(classes, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int best = 0;
    for (int c = 1; c < classes; ++c) {
      if (rows[i][c] > rows[i][best]) best = c;
    }
    ++total[truth[i]];
    if (best == truth[i]) ++hit[truth[i]];
  }
  double sum = 0;
  int present = 0;
  for (int c = 0; c < classes; ++c) {
    if (total[c] == 0) continue;
    sum += double(hit[c]) / double(total[c]);
    ++present;
  }
  return sum / present;
}

}  // namespace oracle
