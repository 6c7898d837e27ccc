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

#include "lesion/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_set>

#include "lesion/error.hpp"
#include "parallel.hpp"

namespace lesion {
namespace {

double row_mean(const ImageTensor& img, int y, int x0, int x1) {
  double sum = 0.0;
  for (int x = x0; x < x1; ++x) sum += img.luminance(x, y);
  return sum / (x1 - x0);
}

double column_mean(const ImageTensor& img, int x, int y0, int y1) {
  double sum = 0.0;
  for (int y = y0; y < y1; ++y) sum += img.luminance(x, y);
  return sum / (y1 - y0);
}

}  // namespace

ContentBox full_box(const ImageTensor& img) { return {0, 0, img.width(), img.height()}; }

ContentBox detect_content_box(const ImageTensor& img, double threshold, double min_keep) {
  ContentBox box = full_box(img);
  enum Edge { kTop, kBottom, kLeft, kRight };
  while (true) {
    double best = threshold;
    std::optional<Edge> darkest;
    auto consider = [&](Edge e, double mean) {
      if (mean < best) {
        best = mean;
        darkest = e;
      }
    };
    if (box.height() > 1) {
      consider(kTop, row_mean(img, box.top, box.left, box.right));
      consider(kBottom, row_mean(img, box.bottom - 1, box.left, box.right));
    }
    if (box.width() > 1) {
      consider(kLeft, column_mean(img, box.left, box.top, box.bottom));
      consider(kRight, column_mean(img, box.right - 1, box.top, box.bottom));
    }
    if (!darkest) break;
    switch (*darkest) {
      case kTop: ++box.top; break;
      case kBottom: --box.bottom; break;
      case kLeft: ++box.left; break;
      case kRight: --box.right; break;
    }
  }
  const double full_area = static_cast<double>(img.width()) * img.height();
  if (static_cast<double>(box.area()) < min_keep * full_area) return full_box(img);
  return box;
}

ImageTensor trim_borders(const ImageTensor& img, const ContentBox& box) {
  if (box.left < 0 || box.top < 0 || box.right > img.width() || box.bottom > img.height() ||
      box.width() < 1 || box.height() < 1) {
    throw Error("content box (" + std::to_string(box.left) + "," + std::to_string(box.top) + "," +
                std::to_string(box.right) + "," + std::to_string(box.bottom) +
                ") is out of range for a " + std::to_string(img.width()) + "x" +
                std::to_string(img.height()) + " image");
  }
  return crop(img, box.left, box.top, box.width(), box.height());
}

ImageTensor resize_aspect(const ImageTensor& img, int target_short_side) {
  if (target_short_side < 1) throw Error("target short side must be at least 1");
  const int w = img.width();
  const int h = img.height();
  int out_w = target_short_side;
  int out_h = target_short_side;
  if (w < h) {
    out_h = static_cast<int>(std::lround(static_cast<double>(h) * target_short_side / w));
  } else if (h < w) {
    out_w = static_cast<int>(std::lround(static_cast<double>(w) * target_short_side / h));
  }
  return resize_bilinear(img, std::max(out_w, 1), std::max(out_h, 1));
}

ImageTensor crop_bottom_fraction(const ImageTensor& img, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("bottom crop fraction must be in [0, 1)");
  const int remove = static_cast<int>(std::floor(img.height() * fraction));
  const int keep = std::max(1, img.height() - remove);
  if (keep == img.height()) return img;
  return crop(img, 0, 0, img.width(), keep);
}

void PreprocessOptions::validate() const {
  if (!(threshold >= 0.0 && threshold <= 255.0)) throw Error("threshold must be within 0..255");
  if (!(min_keep > 0.0 && min_keep <= 1.0)) throw Error("min_keep must be in (0, 1]");
  if (target_short_side < 1) throw Error("target_short_side is required and must be positive");
  for (const auto& [source, fraction] : bottom_crop_by_source) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
      throw Error("bottom crop for source '" + source + "' must be in [0, 1)");
    }
  }
}

PreprocessOutcome preprocess_images(const std::vector<PreprocessItem>& items,
                                    const std::filesystem::path& out_dir,
                                    const PreprocessOptions& options) {
  options.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  // Output names are fixed up front so they do not depend on scheduling.
  std::vector<std::filesystem::path> targets;
  targets.reserve(items.size());
  std::unordered_set<std::string> used;
  for (const auto& item : items) {
    const std::string stem = image_id_from_path(item.source_path);
    std::string name = stem;
    for (int n = 1; !used.insert(name).second; ++n) name = stem + "_" + std::to_string(n);
    targets.push_back(out_dir / (name + ".png"));
  }

  struct Slot {
    std::optional<ContentBox> box;
    std::string error;
  };
  std::vector<Slot> slots(items.size());
  detail::parallel_for(items.size(), options.workers, [&](std::size_t i) {
    try {
      ImageTensor img = read_image(items[i].source_path);
      if (const auto it = options.bottom_crop_by_source.find(items[i].source);
          it != options.bottom_crop_by_source.end()) {
        img = crop_bottom_fraction(img, it->second);
      }
      const ContentBox box = detect_content_box(img, options.threshold, options.min_keep);
      write_png(resize_aspect(trim_borders(img, box), options.target_short_side), targets[i]);
      slots[i].box = box;
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  PreprocessOutcome out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (slots[i].box) {
      out.output_paths.push_back(targets[i].string());
      out.succeeded.push_back(i);
      out.boxes.push_back({items[i].source_path, *slots[i].box});
    } else {
      out.failures.push_back({items[i].source_path, slots[i].error});
    }
  }
  return out;
}

PreprocessResult preprocess_batch(const Manifest& manifest, const std::filesystem::path& out_dir,
                                  const PreprocessOptions& options) {
  std::vector<PreprocessItem> items;
  items.reserve(manifest.records.size());
  for (const auto& r : manifest.records) items.push_back({r.path, r.source});
  PreprocessOutcome outcome = preprocess_images(items, out_dir, options);

  PreprocessResult result;
  for (std::size_t k = 0; k < outcome.succeeded.size(); ++k) {
    ManifestRecord rec = manifest.records[outcome.succeeded[k]];
    rec.path = outcome.output_paths[k];
    result.manifest.records.push_back(std::move(rec));
  }
  result.boxes = std::move(outcome.boxes);
  result.failures = std::move(outcome.failures);
  return result;
}

std::string format_box_log(const std::vector<BoxLogEntry>& boxes) {
  std::string out = "path,left,top,right,bottom\n";
  for (const auto& e : boxes) {
    out += e.path + ',' + std::to_string(e.box.left) + ',' + std::to_string(e.box.top) + ',' +
           std::to_string(e.box.right) + ',' + std::to_string(e.box.bottom) + '\n';
  }
  return out;
}

std::string format_failure_log(const std::vector<PreprocessFailure>& failures) {
  std::string out = "path,reason\n";
  for (const auto& f : failures) {
    std::string reason = f.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out += f.path + ',' + reason + '\n';
  }
  return out;
}

}  // namespace lesion
