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
#include <span>
#include <vector>

namespace lesion {

/// 8-bit RGB image, row-major, channels interleaved.
class ImageTensor {
 public:
  static constexpr int kChannels = 3;

  /// Uniform image. Throws unless width and height are at least 1.
  ImageTensor(int width, int height, std::uint8_t fill = 0);
  /// Takes ownership of width * height * 3 samples.
  ImageTensor(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t sample_count() const { return samples_.size(); }

  std::uint8_t at(int x, int y, int c) const { return samples_[offset(x, y) + c]; }
  std::uint8_t& at(int x, int y, int c) { return samples_[offset(x, y) + c]; }
  void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  /// 0.299 R + 0.587 G + 0.114 B.
  double luminance(int x, int y) const;

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> samples_;
};

/// Copies the w x h region with top-left corner (x, y). Throws if the region
/// is empty or leaves the image.
ImageTensor crop(const ImageTensor& img, int x, int y, int w, int h);
ImageTensor flip_horizontal(const ImageTensor& img);
ImageTensor flip_vertical(const ImageTensor& img);

/// Bilinear resampling with pixel centers at (i + 0.5) / size. Same-size
/// resizes return an exact copy.
ImageTensor resize_bilinear(const ImageTensor& img, int width, int height);

/// Decodes PNG or JPEG (or anything the codec backend understands) into RGB.
/// Throws lesion::Error for missing, unreadable or corrupt files.
ImageTensor read_image(const std::filesystem::path& file);

/// Lossless PNG. Throws lesion::Error on failure.
void write_png(const ImageTensor& img, const std::filesystem::path& file);

/// Tiles images left-to-right, top-to-bottom on a black canvas with the given
/// gap. Cells are sized to the largest image.
ImageTensor contact_sheet(std::span<const ImageTensor> images, int columns, int gap = 4);

}  // namespace lesion
