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

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "lesion/image.hpp"

namespace lesion {

/// Bounds for training-time augmentation. Field names follow the usual
/// fastai-style transform parameters.
struct AugmentationPolicy {
  double max_rotate = 45.0;   // degrees
  double p_affine = 0.5;
  bool do_flip = true;
  bool flip_vert = true;
  double max_zoom = 1.05;
  double max_lighting = 0.2;
  double max_shear = 0.0;     // degrees
  int crop_pad_size = 224;    // output side length
  std::pair<int, int> cutout_holes{1, 1};
  std::pair<int, int> cutout_length{16, 16};
  double cutout_p = 0.5;

  /// Throws lesion::Error when a bound is out of range.
  void validate() const;
};

struct CutoutRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const CutoutRect&, const CutoutRect&) = default;
};

/// One concrete draw from an AugmentationPolicy.
struct TransformSample {
  bool apply_affine = false;
  double angle = 0.0;   // degrees, counter-clockwise as displayed
  double shear = 0.0;   // degrees
  double dx = 0.0;      // translation, fraction of input width
  double dy = 0.0;      // translation, fraction of input height
  double zoom = 1.0;
  bool flip_h = false;
  bool flip_v = false;
  double lighting = 0.0;
  std::vector<CutoutRect> cutouts;  // in output coordinates
  int size = 224;                   // output is size x size

  bool is_identity() const;

  friend bool operator==(const TransformSample&, const TransformSample&) = default;
};

/// Deterministic in (policy, seed, item_key). Draw order per item:
/// affine gate, angle, shear, zoom, dx, dy, flip_h, flip_v, lighting, cutout
/// gate, hole count, then (length, x, y) per hole. Translation is bounded by
/// the slack the zoom creates: |dx|, |dy| <= (1 - 1/zoom) / 2.
TransformSample sample_transform(const AugmentationPolicy& policy, std::uint64_t seed,
                                 std::string_view item_key);

/// Affine resample (bilinear, reflection padding) onto a size x size grid
/// centred on the input, then flips, lighting and cutout, in that order.
/// Requires an input of at least 2x2.
ImageTensor apply_transform(const ImageTensor& img, const TransformSample& t);

/// Sets every sample inside rect to `fill`. Throws if rect leaves the image
/// or is empty.
ImageTensor apply_cutout(const ImageTensor& img, const CutoutRect& rect, std::uint8_t fill = 0);

/// Brightness and contrast jitter in logit space:
///   y = logit((v + 0.5) / 256);  y' = (1 + lighting) * y + logit(0.5 + lighting / 2)
/// lighting == 0 returns the input unchanged.
ImageTensor adjust_lighting(const ImageTensor& img, double lighting);

inline constexpr double kTtaScale = 1.05;
inline constexpr std::size_t kTtaVariantCount = 8;

/// Top-left, top-right, bottom-left, bottom-right crop origins.
std::array<std::pair<int, int>, 4> tta_corner_origins(int width, int height, int crop_size);

/// Eight deterministic test-time variants: the image is zoomed by `scale`,
/// the four corner crops are taken, and each corner is emitted unflipped and
/// then horizontally flipped (TL, TL', TR, TR', BL, BL', BR, BR').
std::vector<ImageTensor> tta_variants(const ImageTensor& img, int crop_size,
                                      double scale = kTtaScale);

}  // namespace lesion
