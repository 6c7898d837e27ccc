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

#include "lesion/datamodel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "lesion/error.hpp"

namespace lesion {
namespace {

constexpr std::string_view kIdColumn = "image";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Splits into lines, dropping a trailing CR and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::string at_row(std::string_view origin, std::size_t row) {
  return " at row " + std::to_string(row) + " (" + std::string(origin) + ")";
}

std::string category_header() {
  std::string h(kIdColumn);
  for (auto name : kCategoryNames) {
    h += ',';
    h += name;
  }
  return h;
}

void check_category_header(std::string_view header, std::string_view origin) {
  const auto fields = split_fields(header);
  if (fields.size() != kNumCategories + 1 || fields[0] != kIdColumn) {
    throw Error("wrong column set in " + std::string(origin) + ": expected header '" +
                category_header() + "', got '" + std::string(header) + "'");
  }
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (fields[c + 1] != kCategoryNames[c]) {
      const bool known = parse_category(fields[c + 1]).has_value();
      throw Error(std::string(known ? "wrong column order" : "unknown column '" +
                                                                 std::string(fields[c + 1]) + "'") +
                  " in " + std::string(origin) + ": expected header '" + category_header() + "'");
    }
  }
}

double parse_number(std::string_view field, std::size_t row, std::string_view origin) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw Error("non-numeric value '" + std::string(field) + "'" + at_row(origin, row));
  }
  if (!std::isfinite(v)) {
    throw Error("non-finite confidence '" + std::string(field) + "'" + at_row(origin, row));
  }
  return v;
}

std::int64_t parse_count(std::string_view field, std::size_t row, std::string_view origin) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || v < 0) {
    throw Error("invalid count '" + std::string(field) + "'" + at_row(origin, row));
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

PredictionSet::PredictionSet(std::size_t num_classes) : num_classes_(num_classes) {
  if (num_classes_ == 0) throw Error("prediction set needs at least one class");
}

PredictionSet::PredictionSet(std::vector<std::string> ids, std::vector<double> values,
                             std::size_t num_classes)
    : ids_(std::move(ids)), values_(std::move(values)), num_classes_(num_classes) {
  if (num_classes_ == 0) throw Error("prediction set needs at least one class");
  if (values_.size() != ids_.size() * num_classes_) {
    throw Error("prediction set has " + std::to_string(values_.size()) + " values for " +
                std::to_string(ids_.size()) + " rows of width " + std::to_string(num_classes_));
  }
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) throw Error("duplicate image id '" + ids_[r] + "'");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw Error("invalid confidence " + format_double(v) + " for image '" +
                  ids_[i / num_classes_] + "'");
    }
  }
}

std::optional<std::size_t> PredictionSet::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GroundTruthSet::GroundTruthSet(std::vector<std::string> ids, std::vector<Category> labels)
    : ids_(std::move(ids)), labels_(std::move(labels)) {
  if (ids_.size() != labels_.size()) throw Error("ground truth: ids and labels differ in length");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw Error("duplicate image id '" + ids_[i] + "'");
    if (index_of(labels_[i]) >= kNumCategories) throw Error("invalid label for '" + ids_[i] + "'");
  }
}

std::optional<std::size_t> GroundTruthSet::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t ClassCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<double> ClassCounts::priors() const {
  const std::int64_t sum = total();
  std::vector<double> p(counts.size(), 0.0);
  if (sum <= 0) return p;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    p[c] = static_cast<double>(counts[c]) / static_cast<double>(sum);
  }
  return p;
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error("weight vector is empty");
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    if (!std::isfinite(weights_[c]) || weights_[c] <= 0.0) {
      throw Error("class weight " + std::to_string(c) + " is not a positive finite number");
    }
  }
}

WeightVector WeightVector::normalized() const {
  const double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  const double scale = static_cast<double>(weights_.size()) / sum;
  std::vector<double> out(weights_);
  for (double& w : out) w *= scale;
  return WeightVector(std::move(out));
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::none: return "none";
  }
  return "none";
}

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "valid") return Split::valid;
  if (s == "none" || s.empty()) return Split::none;
  return std::nullopt;
}

void check_unique_paths(const Manifest& m) {
  std::unordered_set<std::string_view> seen;
  for (const auto& r : m.records) {
    if (!seen.insert(r.path).second) throw Error("duplicate manifest path '" + r.path + "'");
  }
}

ClassCounts count_labels(const Manifest& m, std::optional<Split> split) {
  ClassCounts counts;
  for (const auto& r : m.records) {
    if (split && r.split != *split) continue;
    ++counts.counts[index_of(r.label)];
  }
  return counts;
}

std::string image_id_from_path(std::string_view path) {
  return std::filesystem::path(path).stem().string();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("failed to format number");
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open '" + file.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& file, std::string_view contents) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + file.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error("failed writing '" + file.string() + "'");
}

// ---------------------------------------------------------------------------
// Predictions

PredictionSet parse_predictions_text(std::string_view text, std::string_view origin) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error("missing header in " + std::string(origin));
  check_category_header(lines[0], origin);

  std::vector<std::string> ids;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != kNumCategories + 1) {
      throw Error("expected " + std::to_string(kNumCategories + 1) + " fields, got " +
                  std::to_string(fields.size()) + at_row(origin, row));
    }
    if (fields[0].empty()) throw Error("missing image id" + at_row(origin, row));
    std::string id(fields[0]);
    if (!seen.insert(id).second) throw Error("duplicate image id '" + id + "'" + at_row(origin, row));
    for (std::size_t c = 1; c <= kNumCategories; ++c) {
      const double v = parse_number(fields[c], row, origin);
      if (v < 0.0) throw Error("negative confidence" + at_row(origin, row));
      values.push_back(v);
    }
    ids.push_back(std::move(id));
  }
  return PredictionSet(std::move(ids), std::move(values));
}

PredictionSet parse_predictions(const std::filesystem::path& file) {
  return parse_predictions_text(read_text_file(file), file.string());
}

std::string format_predictions(const PredictionSet& preds) {
  if (preds.num_classes() != kNumCategories) {
    throw Error("only 9-class prediction sets can be serialized");
  }
  std::string out = category_header() + "\n";
  for (std::size_t r = 0; r < preds.size(); ++r) {
    out += preds.id(r);
    for (double v : preds.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_predictions(const PredictionSet& preds, const std::filesystem::path& file) {
  write_text_file(file, format_predictions(preds));
}

// ---------------------------------------------------------------------------
// Ground truth

GroundTruthSet parse_ground_truth_text(std::string_view text, std::string_view origin) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error("missing header in " + std::string(origin));
  check_category_header(lines[0], origin);

  std::vector<std::string> ids;
  std::vector<Category> labels;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != kNumCategories + 1) {
      throw Error("expected " + std::to_string(kNumCategories + 1) + " fields, got " +
                  std::to_string(fields.size()) + at_row(origin, row));
    }
    if (fields[0].empty()) throw Error("missing image id" + at_row(origin, row));
    std::string id(fields[0]);
    if (!seen.insert(id).second) throw Error("duplicate image id '" + id + "'" + at_row(origin, row));
    std::optional<std::size_t> hot;
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      const double v = parse_number(fields[c + 1], row, origin);
      if (v == 1.0) {
        if (hot) throw Error("row is not one-hot" + at_row(origin, row));
        hot = c;
      } else if (v != 0.0) {
        throw Error("row is not one-hot" + at_row(origin, row));
      }
    }
    if (!hot) throw Error("row is not one-hot" + at_row(origin, row));
    ids.push_back(std::move(id));
    labels.push_back(kAllCategories[*hot]);
  }
  return GroundTruthSet(std::move(ids), std::move(labels));
}

GroundTruthSet parse_ground_truth(const std::filesystem::path& file) {
  return parse_ground_truth_text(read_text_file(file), file.string());
}

std::string format_ground_truth(const GroundTruthSet& truth) {
  std::string out = category_header() + "\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out += truth.id(i);
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      out += (index_of(truth.label(i)) == c) ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

Manifest parse_manifest_text(std::string_view text, bool allow_duplicates, std::string_view origin) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "path,source,label,split") {
    throw Error("manifest " + std::string(origin) + " must start with header 'path,source,label,split'");
  }
  Manifest m;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4) throw Error("expected 4 fields" + at_row(origin, row));
    if (fields[0].empty()) throw Error("empty path" + at_row(origin, row));
    const auto label = parse_category(fields[2]);
    if (!label) throw Error("unknown label '" + std::string(fields[2]) + "'" + at_row(origin, row));
    const auto split = parse_split(fields[3]);
    if (!split) throw Error("unknown split '" + std::string(fields[3]) + "'" + at_row(origin, row));
    m.records.push_back({std::string(fields[0]), std::string(fields[1]), *label, *split});
  }
  if (!allow_duplicates) check_unique_paths(m);
  return m;
}

Manifest parse_manifest(const std::filesystem::path& file, bool allow_duplicates) {
  return parse_manifest_text(read_text_file(file), allow_duplicates, file.string());
}

std::string format_manifest(const Manifest& m) {
  std::string out = "path,source,label,split\n";
  for (const auto& r : m.records) {
    if (r.path.find(',') != std::string::npos || r.source.find(',') != std::string::npos) {
      throw Error("manifest fields may not contain commas: '" + r.path + "'");
    }
    out += r.path + ',' + r.source + ',' + std::string(to_string(r.label)) + ',' +
           std::string(to_string(r.split)) + '\n';
  }
  return out;
}

void write_manifest(const Manifest& m, const std::filesystem::path& file) {
  write_text_file(file, format_manifest(m));
}

// ---------------------------------------------------------------------------
// Class counts

ClassCounts parse_class_counts_text(std::string_view text, std::string_view origin) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "category,count") {
    throw Error("class counts " + std::string(origin) + " must start with header 'category,count'");
  }
  ClassCounts counts;
  std::vector<bool> seen(kNumCategories, false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 2) throw Error("expected 2 fields" + at_row(origin, row));
    const auto cat = parse_category(fields[0]);
    if (!cat) throw Error("unknown category '" + std::string(fields[0]) + "'" + at_row(origin, row));
    if (seen[index_of(*cat)]) throw Error("duplicate category" + at_row(origin, row));
    seen[index_of(*cat)] = true;
    counts.counts[index_of(*cat)] = parse_count(fields[1], row, origin);
  }
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    if (!seen[c]) {
      throw Error("class counts " + std::string(origin) + " missing category " +
                  std::string(kCategoryNames[c]));
    }
  }
  return counts;
}

ClassCounts parse_class_counts(const std::filesystem::path& file) {
  return parse_class_counts_text(read_text_file(file), file.string());
}

std::string format_class_counts(const ClassCounts& counts) {
  if (counts.counts.size() != kNumCategories) throw Error("class counts must have 9 entries");
  std::string out = "category,count\n";
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    out += std::string(kCategoryNames[c]) + ',' + std::to_string(counts.counts[c]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

AlignedPair align(const PredictionSet& preds, const GroundTruthSet& truth) {
  std::vector<std::string> missing_preds;
  std::vector<std::string> missing_truth;
  for (const auto& id : truth.ids()) {
    if (!preds.find(id)) missing_preds.push_back(id);
  }
  for (const auto& id : preds.ids()) {
    if (!truth.find(id)) missing_truth.push_back(id);
  }
  if (!missing_preds.empty() || !missing_truth.empty()) {
    std::string msg = "image ids differ between predictions and ground truth";
    auto list = [&msg](std::string_view what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += "; ";
      msg += what;
      msg += ":";
      for (const auto& id : ids) msg += " " + id;
    };
    list("missing from predictions", missing_preds);
    list("missing from ground truth", missing_truth);
    throw Error(msg);
  }

  const std::size_t k = preds.num_classes();
  std::vector<double> values;
  values.reserve(truth.size() * k);
  for (const auto& id : truth.ids()) {
    const auto row = preds.row(*preds.find(id));
    values.insert(values.end(), row.begin(), row.end());
  }
  return {PredictionSet(truth.ids(), std::move(values), k), truth};
}

PredictionSet normalize_rows(const PredictionSet& preds) {
  const std::size_t k = preds.num_classes();
  std::vector<double> values(preds.values());
  for (std::size_t r = 0; r < preds.size(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += values[r * k + c];
    if (!(sum > 0.0)) throw Error("cannot normalize all-zero row for image '" + preds.id(r) + "'");
    for (std::size_t c = 0; c < k; ++c) values[r * k + c] /= sum;
  }
  return PredictionSet(preds.ids(), std::move(values), k);
}

}  // namespace lesion
