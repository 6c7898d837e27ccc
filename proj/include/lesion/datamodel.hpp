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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lesion/category.hpp"

namespace lesion {

/// Per-image class confidences, one row per image id.
///
/// Rows are stored contiguously. Entries are finite and non-negative; they
/// are not required to sum to one until normalize_rows() is applied. The
/// width is 9 for anything read from or written to disk; narrower sets are
/// allowed for the numeric kernels.
class PredictionSet {
 public:
  explicit PredictionSet(std::size_t num_classes = kNumCategories);
  /// Validates ids (unique) and values (finite, >= 0, ids.size() * width).
  PredictionSet(std::vector<std::string> ids, std::vector<double> values,
                std::size_t num_classes = kNumCategories);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t num_classes() const { return num_classes_; }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * num_classes_, num_classes_};
  }
  double at(std::size_t r, std::size_t c) const { return values_[r * num_classes_ + c]; }
  const std::vector<double>& values() const& { return values_; }
  std::vector<double> values() && { return std::move(values_); }

  std::optional<std::size_t> find(std::string_view id) const;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::size_t num_classes_;
  std::unordered_map<std::string, std::size_t> index_;
};

class GroundTruthSet {
 public:
  GroundTruthSet() = default;
  GroundTruthSet(std::vector<std::string> ids, std::vector<Category> labels);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<Category>& labels() const { return labels_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  Category label(std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> find(std::string_view id) const;

  friend bool operator==(const GroundTruthSet&, const GroundTruthSet&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<Category> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Per-class sample counts. Nine classes for real data; any width is
/// accepted so the kernels can be exercised on reduced problems.
struct ClassCounts {
  std::vector<std::int64_t> counts = std::vector<std::int64_t>(kNumCategories, 0);

  std::int64_t total() const;
  /// p(c) = n_c / sum_k n_k. All zeros when the total is zero.
  std::vector<double> priors() const;
};

/// Strictly positive, finite per-class loss weights.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t c) const { return weights_[c]; }
  const std::vector<double>& values() const& { return weights_; }
  std::vector<double> values() && { return std::move(weights_); }
  /// Rescaled so the weights sum to size().
  WeightVector normalized() const;

 private:
  std::vector<double> weights_;
};

enum class Split : std::uint8_t { train, valid, none };

std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

struct ManifestRecord {
  std::string path;
  std::string source;
  Category label = Category::MEL;
  Split split = Split::none;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct Manifest {
  std::vector<ManifestRecord> records;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Throws if two records share a path.
void check_unique_paths(const Manifest& m);

/// Counts per category, restricted to the given split when one is passed.
ClassCounts count_labels(const Manifest& m, std::optional<Split> split = std::nullopt);

/// The image id of a path: its file name without extension.
std::string image_id_from_path(std::string_view path);

// ---------------------------------------------------------------------------
// File formats. Prediction and ground-truth files share the header
// `image,MEL,NV,BCC,AK,BKL,DF,VASC,SCC,UNK`; manifests use
// `path,source,label,split`; class counts use `category,count` with one row
// per category in canonical order. Row numbers in errors are 1-based and
// count the header as row 1.

PredictionSet parse_predictions(const std::filesystem::path& file);
PredictionSet parse_predictions_text(std::string_view text, std::string_view origin = "<input>");
std::string format_predictions(const PredictionSet& preds);
void write_predictions(const PredictionSet& preds, const std::filesystem::path& file);

GroundTruthSet parse_ground_truth(const std::filesystem::path& file);
GroundTruthSet parse_ground_truth_text(std::string_view text, std::string_view origin = "<input>");
std::string format_ground_truth(const GroundTruthSet& truth);

/// Duplicate paths are rejected unless allow_duplicates is set (oversampled
/// manifests repeat records on purpose).
Manifest parse_manifest(const std::filesystem::path& file, bool allow_duplicates = false);
Manifest parse_manifest_text(std::string_view text, bool allow_duplicates = false,
                             std::string_view origin = "<input>");
std::string format_manifest(const Manifest& m);
void write_manifest(const Manifest& m, const std::filesystem::path& file);

ClassCounts parse_class_counts(const std::filesystem::path& file);
ClassCounts parse_class_counts_text(std::string_view text, std::string_view origin = "<input>");
std::string format_class_counts(const ClassCounts& counts);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view contents);

// ---------------------------------------------------------------------------

struct AlignedPair {
  PredictionSet preds;
  GroundTruthSet truth;
};

/// Reorders predictions into the truth's id order. Throws listing every id
/// that is present on only one side.
AlignedPair align(const PredictionSet& preds, const GroundTruthSet& truth);

/// Divides each row by its sum. Throws on an all-zero row.
PredictionSet normalize_rows(const PredictionSet& preds);

}  // namespace lesion
