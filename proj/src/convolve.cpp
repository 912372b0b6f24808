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

#include "fdb/convolve.hpp"

#include <cmath>

namespace fdb {
namespace {

// out(x,y) = sum_{i,j} k(i,j) * src(x-i, y-j), offsets from the centre tap.
// An impulse input therefore reproduces the kernel itself.
inline void conv_row(const ImageBuffer& src, const Kernel2D& k, int y,
                     ImageBuffer& dst) {
  const int cx = k.width / 2;
  const int cy = k.height / 2;
  for (int x = 0; x < src.width; ++x) {
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      double acc = 0.0;
      for (int ky = 0; ky < k.height; ++ky) {
        const int sy = reflect101(y - (ky - cy), src.height);
        for (int kx = 0; kx < k.width; ++kx) {
          const int sx = reflect101(x - (kx - cx), src.width);
          acc += k.weights[static_cast<std::size_t>(ky) * k.width + kx] *
                 src.at(sx, sy, c);
        }
      }
      dst.at(x, y, c) = quantize_sample(acc);
    }
  }
}

// Horizontal tap sum into a double buffer; quantization waits for the
// vertical pass so separability loses no precision.
inline void gauss_hrow(const ImageBuffer& src, const std::vector<double>& taps,
                       int y, std::vector<double>& tmp) {
  const int r = (static_cast<int>(taps.size()) - 1) / 2;
  for (int x = 0; x < src.width; ++x) {
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        acc += taps[static_cast<std::size_t>(k + r)] *
               src.at(reflect101(x + k, src.width), y, c);
      }
      tmp[src.index(x, y, c)] = acc;
    }
  }
}

inline void gauss_vrow(const std::vector<double>& tmp,
                       const std::vector<double>& taps, int y,
                       ImageBuffer& dst) {
  const int r = (static_cast<int>(taps.size()) - 1) / 2;
  for (int x = 0; x < dst.width; ++x) {
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        acc += taps[static_cast<std::size_t>(k + r)] *
               tmp[dst.index(x, reflect101(y + k, dst.height), c)];
      }
      dst.at(x, y, c) = quantize_sample(acc);
    }
  }
}

ImageBuffer like(const ImageBuffer& img) {
  ImageBuffer out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(img.pixels.size());
  return out;
}

}  // namespace

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidParam("sigma must be positive, got " + std::to_string(sigma));
  }
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int k = -r; k <= r; ++k) {
    const double v = std::exp(-(static_cast<double>(k) * k) /
                              (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(k + r)] = v;
    sum += v;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

Kernel2D motion_line_kernel(int length, double angle_deg) {
  if (length < 1) {
    throw InvalidParam("motion length must be >= 1, got " +
                       std::to_string(length));
  }
  const double rad = angle_deg * std::acos(-1.0) / 180.0;
  const double dx = std::cos(rad);
  const double dy = std::sin(rad);
  const auto odd_ceil = [](double v) {
    int n = static_cast<int>(std::ceil(v));
    if (n < 1) n = 1;
    return n % 2 == 0 ? n + 1 : n;
  };
  Kernel2D k;
  k.width = odd_ceil(length * std::abs(dx));
  k.height = odd_ceil(length * std::abs(dy));
  k.weights.assign(static_cast<std::size_t>(k.width) * k.height, 0.0);
  const int cx = k.width / 2;
  const int cy = k.height / 2;
  const double w = 1.0 / length;
  for (int i = 0; i < length; ++i) {
    const double t = i - (length - 1) / 2.0;
    const int px = cx + static_cast<int>(std::floor(t * dx + 0.5));
    const int py = cy + static_cast<int>(std::floor(t * dy + 0.5));
    k.weights[static_cast<std::size_t>(py) * k.width + px] += w;
  }
  return k;
}

ImageBuffer convolve2d(const ImageBuffer& img, const Kernel2D& kernel) {
  validate(img);
  validate(kernel);
  ImageBuffer dst = like(img);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    conv_row(img, kernel, y, dst);
  }
  return dst;
}

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  validate(img);
  const std::vector<double> taps = gaussian_taps(sigma);
  std::vector<double> tmp(img.pixels.size());
  ImageBuffer dst = like(img);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    gauss_hrow(img, taps, y, tmp);
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y) {
    gauss_vrow(tmp, taps, y, dst);
  }
  return dst;
}

ImageBuffer motion_blur(const ImageBuffer& img, int length, double angle_deg) {
  return convolve2d(img, motion_line_kernel(length, angle_deg));
}

namespace ref {

ImageBuffer convolve2d(const ImageBuffer& img, const Kernel2D& kernel) {
  validate(img);
  validate(kernel);
  ImageBuffer dst = like(img);
  for (int y = 0; y < img.height; ++y) {
    conv_row(img, kernel, y, dst);
  }
  return dst;
}

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  validate(img);
  const std::vector<double> taps = gaussian_taps(sigma);
  std::vector<double> tmp(img.pixels.size());
  ImageBuffer dst = like(img);
  for (int y = 0; y < img.height; ++y) {
    gauss_hrow(img, taps, y, tmp);
  }
  for (int y = 0; y < img.height; ++y) {
    gauss_vrow(tmp, taps, y, dst);
  }
  return dst;
}

}  // namespace ref

}  // namespace fdb
