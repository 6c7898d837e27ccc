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

#include "lesion/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "lesion/error.hpp"

namespace lesion {

ImageTensor::ImageTensor(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
  samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels, fill);
}

ImageTensor::ImageTensor(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels) {
    throw Error("sample count does not match image dimensions");
  }
}

void ImageTensor::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::size_t o = offset(x, y);
  samples_[o] = r;
  samples_[o + 1] = g;
  samples_[o + 2] = b;
}

double ImageTensor::luminance(int x, int y) const {
  const std::size_t o = offset(x, y);
  return 0.299 * samples_[o] + 0.587 * samples_[o + 1] + 0.114 * samples_[o + 2];
}

ImageTensor crop(const ImageTensor& img, int x, int y, int w, int h) {
  if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > img.width() || y + h > img.height()) {
    throw Error("crop region (" + std::to_string(x) + "," + std::to_string(y) + "," +
                std::to_string(w) + "x" + std::to_string(h) + ") outside " +
                std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
  }
  ImageTensor out(w, h);
  const auto src = img.samples();
  auto dst = out.samples();
  const std::size_t row_bytes = static_cast<std::size_t>(w) * ImageTensor::kChannels;
  for (int row = 0; row < h; ++row) {
    const std::size_t from =
        (static_cast<std::size_t>(y + row) * img.width() + x) * ImageTensor::kChannels;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_bytes,
                dst.begin() + static_cast<std::ptrdiff_t>(row * row_bytes));
  }
  return out;
}

ImageTensor flip_horizontal(const ImageTensor& img) {
  ImageTensor out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
      }
    }
  }
  return out;
}

ImageTensor flip_vertical(const ImageTensor& img) {
  ImageTensor out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        out.at(x, img.height() - 1 - y, c) = img.at(x, y, c);
      }
    }
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  ImageTensor out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
        const double bottom = img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
        const double v = top * (1.0 - wy) + bottom * wy;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

ImageTensor read_image(const std::filesystem::path& file) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    throw Error("cannot read image '" + file.string() + "': no such file");
  }
  const cv::Mat bgr = cv::imread(file.string(), cv::IMREAD_COLOR);
  if (bgr.empty() || bgr.type() != CV_8UC3) {
    throw Error("cannot decode image '" + file.string() + "'");
  }
  ImageTensor out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out.set_pixel(x, y, row[x][2], row[x][1], row[x][0]);
  }
  return out;
}

void write_png(const ImageTensor& img, const std::filesystem::path& file) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[x] = cv::Vec3b(img.at(x, y, 2), img.at(x, y, 1), img.at(x, y, 0));
    }
  }
  std::vector<std::uint8_t> encoded;
  try {
    if (!cv::imencode(".png", bgr, encoded, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
      throw Error("PNG encoding failed for '" + file.string() + "'");
    }
  } catch (const cv::Exception& e) {
    throw Error("PNG encoding failed for '" + file.string() + "': " + e.what());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
  out.flush();
  if (!out) throw Error("cannot write '" + file.string() + "'");
}

ImageTensor contact_sheet(std::span<const ImageTensor> images, int columns, int gap) {
  if (images.empty()) throw Error("contact sheet needs at least one image");
  columns = std::max(1, std::min(columns, static_cast<int>(images.size())));
  const int rows = (static_cast<int>(images.size()) + columns - 1) / columns;
  int cell_w = 0;
  int cell_h = 0;
  for (const auto& im : images) {
    cell_w = std::max(cell_w, im.width());
    cell_h = std::max(cell_h, im.height());
  }
  ImageTensor sheet(columns * cell_w + (columns + 1) * gap, rows * cell_h + (rows + 1) * gap);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int ox = gap + static_cast<int>(i % columns) * (cell_w + gap);
    const int oy = gap + static_cast<int>(i / columns) * (cell_h + gap);
    const auto& im = images[i];
    for (int y = 0; y < im.height(); ++y) {
      for (int x = 0; x < im.width(); ++x) {
        sheet.set_pixel(ox + x, oy + y, im.at(x, y, 0), im.at(x, y, 1), im.at(x, y, 2));
      }
    }
  }
  return sheet;
}

}  // namespace lesion
