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

#include "lesion/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lesion/error.hpp"
#include "lesion/rng.hpp"

namespace lesion {
namespace {

void require_nonempty_classes(const ClassCounts& counts, const char* what) {
  std::string empty;
  for (std::size_t c = 0; c < counts.counts.size(); ++c) {
    if (counts.counts[c] <= 0) {
      empty += ' ';
      empty += c < kNumCategories && counts.counts.size() == kNumCategories
                   ? std::string(kCategoryNames[c])
                   : "class " + std::to_string(c);
    }
  }
  if (!empty.empty()) throw Error(std::string(what) + " undefined for empty classes:" + empty);
}

// Fisher-Yates with the platform-independent bounded draw.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

double effective_number(std::int64_t n, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("beta must be in [0, 1)");
  if (n < 0) throw Error("sample count must be non-negative");
  if (n == 0) return 0.0;
  const double one_minus_beta = 1.0 - beta;
  return -std::expm1(static_cast<double>(n) * std::log1p(-one_minus_beta)) / one_minus_beta;
}

WeightVector effective_weights(const ClassCounts& counts, double beta) {
  require_nonempty_classes(counts, "effective class weights");
  std::vector<double> w(counts.counts.size());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = 1.0 / effective_number(counts.counts[c], beta);
  return WeightVector(std::move(w)).normalized();
}

WeightVector inverse_frequency_weights(const ClassCounts& counts) {
  require_nonempty_classes(counts, "inverse frequency weights");
  std::vector<double> w(counts.counts.size());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = 1.0 / static_cast<double>(counts.counts[c]);
  return WeightVector(std::move(w)).normalized();
}

double log_sum_exp(std::span<const double> logits) {
  if (logits.empty()) throw Error("log_sum_exp of an empty vector");
  double max = logits[0];
  for (double x : logits) {
    if (!std::isfinite(x)) throw Error("non-finite logit");
    max = std::max(max, x);
  }
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - max);
  return max + std::log(sum);
}

double weighted_cross_entropy(std::span<const double> logits, std::size_t target,
                              const WeightVector& weights) {
  if (logits.size() != weights.size()) throw Error("logit width does not match the weight vector");
  if (target >= logits.size()) throw Error("target class out of range");
  return weights[target] * (log_sum_exp(logits) - logits[target]);
}

double weighted_cross_entropy(std::span<const double> logits, std::span<const std::size_t> targets,
                              const WeightVector& weights) {
  const std::size_t k = weights.size();
  if (targets.empty()) throw Error("cross-entropy of an empty batch");
  if (logits.size() != targets.size() * k) throw Error("logit matrix does not match the batch size");
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sum += weighted_cross_entropy(logits.subspan(i * k, k), targets[i], weights);
  }
  return sum / static_cast<double>(targets.size());
}

PredictionSet prior_rescale(const PredictionSet& preds, const ClassCounts& counts) {
  const std::size_t k = preds.num_classes();
  if (counts.counts.size() != k) throw Error("class counts do not match the prediction width");
  if (counts.total() <= 0) throw Error("class counts are all zero");
  const std::vector<double> priors = counts.priors();
  std::vector<double> values(preds.values());
  for (std::size_t r = 0; r < preds.size(); ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double& v = values[r * k + c];
      if (priors[c] > 0.0) {
        v /= priors[c];
      } else if (v != 0.0) {
        throw Error("class " + (k == kNumCategories ? std::string(kCategoryNames[c]) : std::to_string(c)) +
                    " has a zero prior but non-zero confidence for image '" + preds.id(r) + "'");
      }
    }
  }
  return normalize_rows(PredictionSet(preds.ids(), std::move(values), k));
}

Manifest oversample_manifest(const Manifest& manifest, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(kNumCategories);
  std::vector<bool> present(kNumCategories, false);
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    present[index_of(r.label)] = true;
    if (r.split != Split::valid) by_class[index_of(r.label)].push_back(i);
  }
  std::string empty;
  std::size_t majority = 0;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (present[c] && by_class[c].empty()) empty += " " + std::string(kCategoryNames[c]);
    majority = std::max(majority, by_class[c].size());
  }
  if (!empty.empty()) throw Error("cannot oversample; no training records for:" + empty);

  Manifest out = manifest;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    const auto& pool = by_class[c];
    if (pool.empty()) continue;
    Rng rng(seed, "oversample/" + std::string(kCategoryNames[c]));
    for (std::size_t added = pool.size(); added < majority; ++added) {
      out.records.push_back(manifest.records[pool[rng.below(pool.size())]]);
    }
  }
  return out;
}

std::int64_t stratum_valid_count(std::int64_t n, double valid_fraction) {
  // The epsilon absorbs binary representation error in the fraction so that
  // exact halves such as 0.1 * 5415 round up as intended.
  return static_cast<std::int64_t>(std::floor(valid_fraction * static_cast<double>(n) + 0.5 + 1e-9));
}

Manifest split_manifest(const Manifest& manifest, double valid_fraction, std::uint64_t seed) {
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) {
    throw Error("valid fraction must be strictly between 0 and 1");
  }
  std::vector<std::vector<std::size_t>> by_class(kNumCategories);
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    by_class[index_of(manifest.records[i].label)].push_back(i);
  }
  if (manifest.records.empty()) throw Error("cannot split an empty manifest");

  Manifest out = manifest;
  for (auto& r : out.records) r.split = Split::train;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    std::vector<std::size_t> members = by_class[c];
    Rng rng(seed, "split/" + std::string(kCategoryNames[c]));
    shuffle(members, rng);
    const auto n_valid = static_cast<std::size_t>(
        stratum_valid_count(static_cast<std::int64_t>(members.size()), valid_fraction));
    for (std::size_t k = 0; k < n_valid && k < members.size(); ++k) {
      out.records[members[k]].split = Split::valid;
    }
  }
  return out;
}

}  // namespace lesion
