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

#include <span>
#include <vector>

#include "lesion/datamodel.hpp"

namespace lesion {

inline constexpr double kTtaBeta = 0.4;

/// beta * regular + (1 - beta) * mean(augmented), cell by cell. Every set must
/// carry the same ids in the same order.
PredictionSet tta_merge(const PredictionSet& regular, std::span<const PredictionSet> augmented,
                        double beta = kTtaBeta);

/// Cell-wise arithmetic mean. Each cell's values are sorted before summing,
/// so the result is bit-identical under any permutation of the members.
PredictionSet ensemble_mean(std::span<const PredictionSet> members);

/// Cell-wise weighted mean, sum(w_i x_i) / sum(w_i); weights must be
/// non-negative with a positive sum. Also permutation invariant.
PredictionSet ensemble_weighted(std::span<const PredictionSet> members,
                                std::span<const double> weights);

/// Max-subtracted softmax. Throws on non-finite or empty input.
std::vector<double> softmax(std::span<const double> logits);

/// Throws listing the differing ids unless both sets have identical id lists.
void require_same_ids(const PredictionSet& a, const PredictionSet& b);

}  // namespace lesion
