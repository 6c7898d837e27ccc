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

#include "lesion/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lesion/error.hpp"
#include "lesion/rng.hpp"

namespace lesion {
namespace {

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Symmetric reflection about the outer pixel edges, then clamped onto valid
// pixel centres.
double reflect(double x, int n) {
  const double period = 2.0 * n;
  double m = std::fmod(x + 0.5, period);
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return std::clamp(m - 0.5, 0.0, n - 1.0);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

ImageTensor resample_affine(const ImageTensor& img, const TransformSample& t) {
  const int w = img.width();
  const int h = img.height();
  const int size = t.size;
  // Output centre and the integer-aligned centre of the input region it maps
  // to, so that an identity transform lands exactly on pixel centres.
  const double out_centre = size / 2.0;
  const double in_cx = floor_div(w - size, 2) + out_centre;
  const double in_cy = floor_div(h - size, 2) + out_centre;

  // Forward map: out = R(angle) * Shear * zoom * (in - centre). Invert it.
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // inverse 2x2
  double tx = 0.0, ty = 0.0;
  if (t.apply_affine) {
    const double th = radians(t.angle);
    const double cs = std::cos(th);
    const double sn = std::sin(th);
    const double k = std::tan(radians(t.shear));
    // Rotation in y-down coordinates, counter-clockwise on screen.
    const double r00 = cs, r01 = sn, r10 = -sn, r11 = cs;
    // M = R * [[1, k], [0, 1]] * zoom
    const double m00 = r00 * t.zoom;
    const double m01 = (r00 * k + r01) * t.zoom;
    const double m10 = r10 * t.zoom;
    const double m11 = (r10 * k + r11) * t.zoom;
    const double det = m00 * m11 - m01 * m10;
    a = m11 / det;
    b = -m01 / det;
    c = -m10 / det;
    d = m00 / det;
    tx = t.dx * w;
    ty = t.dy * h;
  }

  ImageTensor out(size, size);
  for (int v = 0; v < size; ++v) {
    const double qy = v + 0.5 - out_centre;
    for (int u = 0; u < size; ++u) {
      const double qx = u + 0.5 - out_centre;
      const double sx = reflect(in_cx + tx + a * qx + b * qy - 0.5, w);
      const double sy = reflect(in_cy + ty + c * qx + d * qy - 0.5, h);
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int ch = 0; ch < ImageTensor::kChannels; ++ch) {
        const double top = img.at(x0, y0, ch) * (1.0 - fx) + img.at(x1, y0, ch) * fx;
        const double bottom = img.at(x0, y1, ch) * (1.0 - fx) + img.at(x1, y1, ch) * fx;
        out.at(u, v, ch) = to_byte(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

}  // namespace

void AugmentationPolicy::validate() const {
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(name) + " must be a probability in [0, 1]");
  };
  probability(p_affine, "p_affine");
  probability(cutout_p, "cutout_p");
  if (!(max_rotate >= 0.0)) throw Error("max_rotate must be >= 0");
  if (!(max_zoom >= 1.0)) throw Error("max_zoom must be >= 1");
  if (!(max_lighting >= 0.0 && max_lighting < 1.0)) throw Error("max_lighting must be in [0, 1)");
  if (!(max_shear >= 0.0 && max_shear < 90.0)) throw Error("max_shear must be in [0, 90)");
  if (crop_pad_size < 1) throw Error("crop_pad_size must be positive");
  if (cutout_holes.first < 0 || cutout_holes.second < cutout_holes.first) {
    throw Error("cutout_holes must be a range lo..hi with 0 <= lo <= hi");
  }
  if (cutout_length.first < 1 || cutout_length.second < cutout_length.first) {
    throw Error("cutout_length must be a range lo..hi with 1 <= lo <= hi");
  }
}

bool TransformSample::is_identity() const {
  return !apply_affine && !flip_h && !flip_v && lighting == 0.0 && cutouts.empty();
}

TransformSample sample_transform(const AugmentationPolicy& policy, std::uint64_t seed,
                                 std::string_view item_key) {
  policy.validate();
  Rng rng(seed, item_key);
  TransformSample t;
  t.size = policy.crop_pad_size;

  const bool affine = rng.bernoulli(policy.p_affine);
  const double angle = rng.uniform(-policy.max_rotate, policy.max_rotate);
  const double shear = rng.uniform(-policy.max_shear, policy.max_shear);
  const double zoom = rng.uniform(1.0, policy.max_zoom);
  const double slack = (1.0 - 1.0 / zoom) / 2.0;
  const double dx = rng.uniform(-slack, slack);
  const double dy = rng.uniform(-slack, slack);
  if (affine) {
    t.apply_affine = true;
    t.angle = angle;
    t.shear = shear;
    t.zoom = zoom;
    t.dx = dx;
    t.dy = dy;
  }

  const bool flip_h = rng.bernoulli(0.5);
  const bool flip_v = rng.bernoulli(0.5);
  t.flip_h = policy.do_flip && flip_h;
  t.flip_v = policy.do_flip && policy.flip_vert && flip_v;

  const double lighting = rng.uniform(-policy.max_lighting, policy.max_lighting);
  t.lighting = policy.max_lighting > 0.0 ? lighting : 0.0;

  if (rng.bernoulli(policy.cutout_p)) {
    const auto holes = rng.between(policy.cutout_holes.first, policy.cutout_holes.second);
    for (std::int64_t i = 0; i < holes; ++i) {
      const int len = std::min<int>(
          static_cast<int>(rng.between(policy.cutout_length.first, policy.cutout_length.second)),
          t.size);
      const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(t.size - len + 1)));
      const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(t.size - len + 1)));
      t.cutouts.push_back({x, y, len, len});
    }
  }
  return t;
}

ImageTensor apply_transform(const ImageTensor& img, const TransformSample& t) {
  if (img.width() < 2 || img.height() < 2) throw Error("augmentation needs an image of at least 2x2");
  if (t.size < 1) throw Error("transform output size must be positive");
  ImageTensor out = resample_affine(img, t);
  if (t.flip_h) out = flip_horizontal(out);
  if (t.flip_v) out = flip_vertical(out);
  out = adjust_lighting(out, t.lighting);
  for (const auto& rect : t.cutouts) out = apply_cutout(out, rect);
  return out;
}

ImageTensor apply_cutout(const ImageTensor& img, const CutoutRect& rect, std::uint8_t fill) {
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > img.width() ||
      rect.y + rect.h > img.height()) {
    throw Error("cutout rectangle outside the image");
  }
  ImageTensor out = img;
  for (int y = rect.y; y < rect.y + rect.h; ++y) {
    for (int x = rect.x; x < rect.x + rect.w; ++x) out.set_pixel(x, y, fill, fill, fill);
  }
  return out;
}

ImageTensor adjust_lighting(const ImageTensor& img, double lighting) {
  if (lighting == 0.0) return img;
  if (!(std::abs(lighting) < 1.0)) throw Error("lighting magnitude must be below 1");
  auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  const double shift = logit(0.5 + lighting / 2.0);
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    const double y = (1.0 + lighting) * logit((v + 0.5) / 256.0) + shift;
    lut[v] = to_byte(256.0 / (1.0 + std::exp(-y)) - 0.5);
  }
  ImageTensor out = img;
  for (auto& s : out.samples()) s = lut[s];
  return out;
}

std::array<std::pair<int, int>, 4> tta_corner_origins(int width, int height, int crop_size) {
  if (crop_size < 1 || crop_size > width || crop_size > height) {
    throw Error("TTA crop of " + std::to_string(crop_size) + " does not fit a " +
                std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  const int right = width - crop_size;
  const int bottom = height - crop_size;
  return {{{0, 0}, {right, 0}, {0, bottom}, {right, bottom}}};
}

std::vector<ImageTensor> tta_variants(const ImageTensor& img, int crop_size, double scale) {
  if (!(scale > 0.0)) throw Error("TTA scale must be positive");
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
  const ImageTensor zoomed = resize_bilinear(img, w, h);
  std::vector<ImageTensor> out;
  out.reserve(kTtaVariantCount);
  for (const auto& [x, y] : tta_corner_origins(w, h, crop_size)) {
    ImageTensor corner = crop(zoomed, x, y, crop_size, crop_size);
    ImageTensor mirrored = flip_horizontal(corner);
    out.push_back(std::move(corner));
    out.push_back(std::move(mirrored));
  }
  return out;
}

}  // namespace lesion
