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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "fdb/errors.hpp"

namespace fdb {

// 8-bit interleaved RGB raster. All operators treat buffers as immutable
// values: they take a const reference and return a fresh buffer, so
// concurrent use needs no locking.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  static constexpr int kChannels = 3;
  std::vector<std::uint8_t> pixels;  // row-major, width*height*3

  static ImageBuffer filled(int w, int h, std::array<std::uint8_t, 3> rgb);

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * kChannels + c;
  }
  std::uint8_t at(int x, int y, int c) const { return pixels[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return pixels[index(x, y, c)]; }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  bool same_dims(const ImageBuffer& o) const {
    return width == o.width && height == o.height;
  }

  bool operator==(const ImageBuffer&) const = default;
};

// Throws InvalidParam unless dims are >= 1 and the pixel vector length
// matches width*height*3.
void validate(const ImageBuffer& img);

// Odd-sized convolution kernel with an unambiguous centre tap.
struct Kernel2D {
  int width = 0;
  int height = 0;
  std::vector<double> weights;  // row-major
};

// Throws InvalidParam on even dimensions or a length mismatch.
void validate(const Kernel2D& k);

// Fixed output rule for every raster operator: round half away from zero,
// then clamp to [0,255]. Keeps multi-stage pipelines integer-stable.
inline std::uint8_t quantize_sample(double v) {
  long long r = std::llround(v);
  if (r < 0) r = 0;
  if (r > 255) r = 255;
  return static_cast<std::uint8_t>(r);
}

// reflect-101 border indexing: ...3 2 1 | 0 1 2 3 | 2 1 0... Valid for any
// offset, including kernels larger than the image.
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

// 10*log10(255^2 / MSE); +inf for identical buffers.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

double mean_channel(const ImageBuffer& img, int c);
double mean_row(const ImageBuffer& img, int y);

}  // namespace fdb
