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

#include "synthetic.hpp"

#include <algorithm>

#include "lesion/rng.hpp"

namespace synthetic {

namespace {

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)); }

}  // namespace

lesion::ImageTensor bordered_image(int width, int height, const lesion::ContentBox& content,
                                   double min_luma, std::uint64_t seed) {
  lesion::Rng rng(seed);
  lesion::ImageTensor img(width, height, 0);
  for (int y = content.top; y < content.bottom; ++y) {
    for (int x = content.left; x < content.right; ++x) {
      std::array<std::uint8_t, 3> px{};
      do {
        for (auto& v : px) v = static_cast<std::uint8_t>(rng.between(0, 255));
      } while (luma(px[0], px[1], px[2]) <= min_luma);
      img.set_pixel(x, y, px[0], px[1], px[2]);
    }
  }
  return img;
}

std::vector<Item> make_dataset(int per_class, std::uint64_t seed) {
  std::vector<Item> items;
  lesion::Rng rng(seed, "synthetic-dataset");
  int serial = 0;
  for (int k = 0; k < per_class; ++k) {
    for (std::size_t c = 0; c < lesion::kNumCategories; ++c) {
      const int w = static_cast<int>(rng.between(120, 160));
      const int h = static_cast<int>(rng.between(90, 120));
      lesion::ContentBox box{static_cast<int>(rng.between(0, 15)), static_cast<int>(rng.between(0, 15)), 0, 0};
      box.right = w - static_cast<int>(rng.between(0, 15));
      box.bottom = h - static_cast<int>(rng.between(0, 15));

      Rgb base;
      do {
        for (int ch = 0; ch < 3; ++ch) base[ch] = kPalette[c][ch] + rng.uniform(-45.0, 45.0);
      } while (luma(base[0], base[1], base[2]) < 45.0);

      lesion::ImageTensor img(w, h, 0);
      for (int y = box.top; y < box.bottom; ++y) {
        for (int x = box.left; x < box.right; ++x) {
          // A darker blob in the middle keeps the images from being flat.
          const double dx = (x - (box.left + box.right) / 2.0) / (box.right - box.left);
          const double dy = (y - (box.top + box.bottom) / 2.0) / (box.bottom - box.top);
          const double shade = dx * dx + dy * dy < 0.06 ? 0.8 : 1.0;
          const double noise = rng.uniform(-8.0, 8.0);
          img.set_pixel(x, y, clamp8(base[0] * shade + noise), clamp8(base[1] * shade + noise),
                        clamp8(base[2] * shade + noise));
        }
      }
      char id[32];
      std::snprintf(id, sizeof(id), "SYN_%04d", serial++);
      items.push_back({id, lesion::category_at(c), std::move(img), box});
    }
  }
  return items;
}

lesion::GroundTruthSet write_dataset(const std::vector<Item>& items, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> ids;
  std::vector<lesion::Category> labels;
  for (const auto& it : items) {
    lesion::write_png(it.image, dir / (it.id + ".png"));
    ids.push_back(it.id);
    labels.push_back(it.label);
  }
  lesion::GroundTruthSet truth(ids, labels);
  lesion::write_text_file(dir / "truth.csv", lesion::format_ground_truth(truth));
  return truth;
}

}  // namespace synthetic
