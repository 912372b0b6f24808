// Copyright (c) 2026 fdbench contributors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fdb/image.hpp"

#include <cmath>
#include <limits>

namespace fdb {

ImageBuffer ImageBuffer::filled(int w, int h, std::array<std::uint8_t, 3> rgb) {
  ImageBuffer img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h * kChannels);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = rgb[i % kChannels];
  }
  return img;
}

void validate(const ImageBuffer& img) {
  if (img.width < 1 || img.height < 1) {
    throw InvalidParam("image dimensions must be positive, got " +
                       std::to_string(img.width) + "x" +
                       std::to_string(img.height));
  }
  const std::size_t expected =
      static_cast<std::size_t>(img.width) * img.height * ImageBuffer::kChannels;
  if (img.pixels.size() != expected) {
    throw InvalidParam("pixel buffer length " +
                       std::to_string(img.pixels.size()) + " does not match " +
                       std::to_string(expected));
  }
}

void validate(const Kernel2D& k) {
  if (k.width < 1 || k.height < 1 || k.width % 2 == 0 || k.height % 2 == 0) {
    throw InvalidParam("kernel dimensions must be positive and odd, got " +
                       std::to_string(k.width) + "x" +
                       std::to_string(k.height));
  }
  const std::size_t expected = static_cast<std::size_t>(k.width) * k.height;
  if (k.weights.size() != expected) {
    throw InvalidParam("kernel weight count " +
                       std::to_string(k.weights.size()) + " does not match " +
                       std::to_string(expected));
  }
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  validate(a);
  validate(b);
  if (!a.same_dims(b)) throw ShapeError("psnr requires equal dimensions");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.pixels.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double mean_channel(const ImageBuffer& img, int c) {
  validate(img);
  if (c < 0 || c >= ImageBuffer::kChannels) {
    throw InvalidParam("channel out of range");
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    sum += img.pixels[p * ImageBuffer::kChannels + c];
  }
  return sum / static_cast<double>(img.pixel_count());
}

double mean_row(const ImageBuffer& img, int y) {
  validate(img);
  if (y < 0 || y >= img.height) throw InvalidParam("row out of range");
  double sum = 0.0;
  for (int x = 0; x < img.width; ++x) {
    for (int c = 0; c < ImageBuffer::kChannels; ++c) sum += img.at(x, y, c);
  }
  return sum / (static_cast<double>(img.width) * ImageBuffer::kChannels);
}

}  // namespace fdb
