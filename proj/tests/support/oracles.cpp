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

#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

namespace oracle {

fdb::ImageBuffer convolve2d(const fdb::ImageBuffer& img,
                            const fdb::Kernel2D& k) {
  fdb::ImageBuffer out = img;
  const int cx = k.width / 2;
  const int cy = k.height / 2;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int j = 0; j < k.height; ++j) {
          for (int i = 0; i < k.width; ++i) {
            const int sx = fdb::reflect101(x - (i - cx), img.width);
            const int sy = fdb::reflect101(y - (j - cy), img.height);
            acc += k.weights[static_cast<std::size_t>(j) * k.width + i] *
                   img.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = fdb::quantize_sample(acc);
      }
    }
  }
  return out;
}

namespace {

// Cubic convolution kernel, a = -0.5 (Catmull-Rom).
double cubic_weight(double d) {
  constexpr double a = -0.5;
  d = std::abs(d);
  if (d < 1.0) return (a + 2.0) * d * d * d - (a + 3.0) * d * d + 1.0;
  if (d < 2.0) return a * d * d * d - 5.0 * a * d * d + 8.0 * a * d - 4.0 * a;
  return 0.0;
}

}  // namespace

fdb::ImageBuffer resize_bicubic(const fdb::ImageBuffer& img, int out_w,
                                int out_h) {
  if (out_w == img.width && out_h == img.height) return img;
  fdb::ImageBuffer out;
  out.width = out_w;
  out.height = out_h;
  out.pixels.resize(static_cast<std::size_t>(out_w) * out_h * 3);
  const double sx_scale = static_cast<double>(img.width) / out_w;
  const double sy_scale = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double sy = (y + 0.5) * sy_scale - 0.5;
    const int by = static_cast<int>(std::floor(sy));
    for (int x = 0; x < out_w; ++x) {
      const double sx = (x + 0.5) * sx_scale - 0.5;
      const int bx = static_cast<int>(std::floor(sx));
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int j = -1; j <= 2; ++j) {
          const int py = std::clamp(by + j, 0, img.height - 1);
          const double wy = cubic_weight(sy - (by + j));
          for (int i = -1; i <= 2; ++i) {
            const int px = std::clamp(bx + i, 0, img.width - 1);
            const double wx = cubic_weight(sx - (bx + i));
            acc += wy * wx * img.at(px, py, c);
          }
        }
        out.at(x, y, c) = fdb::quantize_sample(acc);
      }
    }
  }
  return out;
}

int matrix_rank(std::vector<double> m, std::size_t rows, std::size_t cols,
                double tol) {
  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
    std::size_t best = pivot_row;
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      if (std::abs(m[r * cols + col]) > std::abs(m[best * cols + col])) {
        best = r;
      }
    }
    if (std::abs(m[best * cols + col]) <= tol) continue;
    if (best != pivot_row) {
      for (std::size_t c = 0; c < cols; ++c) {
        std::swap(m[best * cols + c], m[pivot_row * cols + c]);
      }
    }
    const double pivot = m[pivot_row * cols + col];
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      const double f = m[r * cols + col] / pivot;
      for (std::size_t c = col; c < cols; ++c) {
        m[r * cols + c] -= f * m[pivot_row * cols + c];
      }
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

double laplacian_energy(const fdb::ImageBuffer& img) {
  double total = 0.0;
  std::size_t count = 0;
  for (int y = 1; y + 1 < img.height; ++y) {
    for (int x = 1; x + 1 < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double lap = 4.0 * img.at(x, y, c) - img.at(x - 1, y, c) -
                           img.at(x + 1, y, c) - img.at(x, y - 1, c) -
                           img.at(x, y + 1, c);
        total += std::abs(lap);
        ++count;
      }
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

int max_abs_diff(const fdb::ImageBuffer& a, const fdb::ImageBuffer& b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<int>(a.pixels[i]) -
                                     static_cast<int>(b.pixels[i])));
  }
  return worst;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("fdbtest_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace oracle
