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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lesion/datamodel.hpp"
#include "lesion/image.hpp"

namespace lesion {

/// Retained region of an image; right and bottom are exclusive.
struct ContentBox {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  int width() const { return right - left; }
  int height() const { return bottom - top; }
  long long area() const { return static_cast<long long>(width()) * height(); }

  friend bool operator==(const ContentBox&, const ContentBox&) = default;
};

ContentBox full_box(const ImageTensor& img);

inline constexpr double kDefaultBorderThreshold = 20.0;
inline constexpr double kDefaultMinKeep = 0.25;

/// Finds the region left after peeling dark edge rows and columns.
///
/// Repeatedly looks at the four current edge lines (top row, bottom row, left
/// column, right column, each restricted to the current box) and removes the
/// one with the lowest mean luminance while that mean is below `threshold`.
/// Peeling the darkest line first means a content edge that is still partly
/// covered by a perpendicular border is never removed before the border
/// itself. If the remaining area is below min_keep of the image, the full box
/// is returned instead.
ContentBox detect_content_box(const ImageTensor& img, double threshold = kDefaultBorderThreshold,
                              double min_keep = kDefaultMinKeep);

/// Throws if the box is empty or outside the image.
ImageTensor trim_borders(const ImageTensor& img, const ContentBox& box);

/// Scales so the shorter side equals target_short_side; the longer side is
/// rounded to the nearest pixel. Bilinear.
ImageTensor resize_aspect(const ImageTensor& img, int target_short_side);

/// Removes the bottom `fraction` of the rows (used for sources that carry a
/// caption strip under the image). Keeps at least one row.
ImageTensor crop_bottom_fraction(const ImageTensor& img, double fraction);

struct PreprocessOptions {
  double threshold = kDefaultBorderThreshold;
  double min_keep = kDefaultMinKeep;
  /// Required; there is no sensible default for the model input size.
  int target_short_side = 0;
  /// Per-source caption strip removal, e.g. {"SD-198", 0.1}.
  std::map<std::string, double> bottom_crop_by_source;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;

  void validate() const;
};

struct BoxLogEntry {
  std::string path;
  ContentBox box;
};

struct PreprocessFailure {
  std::string path;
  std::string reason;
};

struct PreprocessItem {
  std::string source_path;
  std::string source;
};

struct PreprocessOutcome {
  /// One entry per successful input, in input order.
  std::vector<std::string> output_paths;
  std::vector<std::size_t> succeeded;  // indices into the input list
  std::vector<BoxLogEntry> boxes;
  std::vector<PreprocessFailure> failures;

  bool ok() const { return failures.empty(); }
};

/// Reads, trims, resizes and writes each image as PNG into out_dir. Output
/// names are the input stems; a clashing stem gets a numeric suffix. Failures
/// are recorded and do not stop the batch. Output order follows input order
/// regardless of worker scheduling.
PreprocessOutcome preprocess_images(const std::vector<PreprocessItem>& items,
                                    const std::filesystem::path& out_dir,
                                    const PreprocessOptions& options);

struct PreprocessResult {
  Manifest manifest;  // successful records, paths pointing at the new files
  std::vector<BoxLogEntry> boxes;
  std::vector<PreprocessFailure> failures;

  bool ok() const { return failures.empty(); }
};

PreprocessResult preprocess_batch(const Manifest& manifest, const std::filesystem::path& out_dir,
                                  const PreprocessOptions& options);

std::string format_box_log(const std::vector<BoxLogEntry>& boxes);
std::string format_failure_log(const std::vector<PreprocessFailure>& failures);

}  // namespace lesion
