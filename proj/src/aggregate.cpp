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

#include "lesion/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "lesion/error.hpp"

namespace lesion {

void require_same_ids(const PredictionSet& a, const PredictionSet& b) {
  if (a.num_classes() != b.num_classes()) throw Error("prediction sets differ in class count");
  if (a.ids() == b.ids()) return;
  std::string only_a;
  std::string only_b;
  for (const auto& id : a.ids()) {
    if (!b.find(id)) only_a += " " + id;
  }
  for (const auto& id : b.ids()) {
    if (!a.find(id)) only_b += " " + id;
  }
  if (only_a.empty() && only_b.empty()) {
    throw Error("prediction sets list the same ids in a different order; align them first");
  }
  std::string msg = "prediction sets have different image ids";
  if (!only_a.empty()) msg += "; only in first:" + only_a;
  if (!only_b.empty()) msg += "; only in second:" + only_b;
  throw Error(msg);
}

PredictionSet ensemble_mean(std::span<const PredictionSet> members) {
  if (members.empty()) throw Error("ensemble needs at least one member");
  std::vector<double> weights(members.size(), 1.0);
  return ensemble_weighted(members, weights);
}

PredictionSet ensemble_weighted(std::span<const PredictionSet> members,
                                std::span<const double> weights) {
  if (members.empty()) throw Error("ensemble needs at least one member");
  if (weights.size() != members.size()) throw Error("one weight per ensemble member is required");
  double weight_sum = 0.0;
  {
    std::vector<double> sorted(weights.begin(), weights.end());
    std::sort(sorted.begin(), sorted.end());
    for (double w : sorted) {
      if (!std::isfinite(w) || w < 0.0) throw Error("ensemble weights must be finite and >= 0");
      weight_sum += w;
    }
  }
  if (!(weight_sum > 0.0)) throw Error("ensemble weights sum to zero");
  const PredictionSet& first = members.front();
  for (const auto& m : members.subspan(1)) require_same_ids(first, m);

  std::vector<double> values(first.values().size());
  std::vector<std::pair<double, double>> cell(members.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t m = 0; m < members.size(); ++m) cell[m] = {members[m].values()[i], weights[m]};
    std::sort(cell.begin(), cell.end());
    double sum = 0.0;
    for (const auto& [x, w] : cell) sum += w * x;
    values[i] = sum / weight_sum;
  }
  return PredictionSet(first.ids(), std::move(values), first.num_classes());
}

PredictionSet tta_merge(const PredictionSet& regular, std::span<const PredictionSet> augmented,
                        double beta) {
  if (augmented.empty()) throw Error("TTA merge needs at least one augmented prediction set");
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("TTA beta must be in [0, 1]");
  for (const auto& a : augmented) require_same_ids(regular, a);
  const PredictionSet mean = ensemble_mean(augmented);
  std::vector<double> values(regular.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = beta * regular.values()[i] + (1.0 - beta) * mean.values()[i];
  }
  return PredictionSet(regular.ids(), std::move(values), regular.num_classes());
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error("softmax of an empty vector");
  double max = logits[0];
  for (double x : logits) {
    if (!std::isfinite(x)) throw Error("non-finite logit");
    max = std::max(max, x);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace lesion
