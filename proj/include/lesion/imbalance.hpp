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

#include "lesion/datamodel.hpp"

namespace lesion {

/// Effective number of samples, (1 - beta^n) / (1 - beta), for beta in [0, 1).
/// Evaluated as -expm1(n * log(beta)) / (1 - beta) to stay accurate as beta
/// approaches 1.
double effective_number(std::int64_t n, double beta);

/// Class weights 1 / E_c, rescaled to sum to the number of classes.
/// beta = 0 gives equal weights; beta -> 1 approaches inverse frequency.
/// Throws, naming every empty class, if any count is zero.
WeightVector effective_weights(const ClassCounts& counts, double beta);

/// Weights proportional to 1 / n_c, rescaled to sum to the number of classes.
WeightVector inverse_frequency_weights(const ClassCounts& counts);

/// log(sum_j exp(x_j)) with the maximum subtracted first.
double log_sum_exp(std::span<const double> logits);

/// W[y] * (-x[y] + logsumexp(x)) for a single item.
double weighted_cross_entropy(std::span<const double> logits, std::size_t target,
                              const WeightVector& weights);

/// Arithmetic mean of the per-item weighted losses. `logits` holds one row of
/// weights.size() values per target.
double weighted_cross_entropy(std::span<const double> logits, std::span<const std::size_t> targets,
                              const WeightVector& weights);

/// Divides each confidence by the class prior n_c / N and renormalizes rows.
/// Classes with a zero prior must have zero confidence everywhere; they stay 0.
PredictionSet prior_rescale(const PredictionSet& preds, const ClassCounts& counts);

/// Tops up every class to the size of the largest one by drawing copies,
/// uniformly with replacement, from that class's records. Only records not
/// assigned to the validation split take part; all original records are kept
/// in order and the copies are appended class by class. Categories with no
/// records at all are ignored; a category that only has validation records
/// is an error.
Manifest oversample_manifest(const Manifest& manifest, std::uint64_t seed);

/// round(fraction * n) with halves rounded up.
std::int64_t stratum_valid_count(std::int64_t n, double valid_fraction);

/// Stratified split: in each class, a seeded shuffle picks
/// stratum_valid_count(n_c, fraction) records for validation and the rest for
/// training. Record order is preserved. Categories without records are
/// skipped; an empty manifest is an error.
Manifest split_manifest(const Manifest& manifest, double valid_fraction, std::uint64_t seed);

}  // namespace lesion
