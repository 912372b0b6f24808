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

#include "fdb/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fdb {
namespace {

struct AxisTap {
  int idx[4];
  double w[4];
};

// Catmull-Rom weights for fractional offset t in [0,1).
inline void catmull_rom(double t, double* w) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = 0.5 * (-t + 2.0 * t2 - t3);
  w[1] = 0.5 * (2.0 - 5.0 * t2 + 3.0 * t3);
  w[2] = 0.5 * (t + 4.0 * t2 - 3.0 * t3);
  w[3] = 0.5 * (-t2 + t3);
}

std::vector<AxisTap> make_taps(int in_n, int out_n) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(out_n));
  const double scale = static_cast<double>(in_n) / out_n;
  for (int o = 0; o < out_n; ++o) {
    const double s = (o + 0.5) * scale - 0.5;
    const double fl = std::floor(s);
    const int base = static_cast<int>(fl);
    catmull_rom(s - fl, taps[o].w);
    for (int k = 0; k < 4; ++k) {
      taps[o].idx[k] = std::clamp(base - 1 + k, 0, in_n - 1);
    }
  }
  return taps;
}

// Row worker shared by the parallel kernel and the serial twin; output rows
// are independent, so scheduling cannot change the result.
inline void resize_row(const ImageBuffer& src, const std::vector<AxisTap>& xt,
                       const AxisTap& yt, int y, ImageBuffer& dst) {
  for (int x = 0; x < dst.width; ++x) {
    const AxisTap& xtap = xt[static_cast<std::size_t>(x)];
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) {
        const int sy = yt.idx[j];
        double row = 0.0;
        for (int i = 0; i < 4; ++i) {
          row += xtap.w[i] * src.at(xtap.idx[i], sy, c);
        }
        acc += yt.w[j] * row;
      }
      dst.at(x, y, c) = quantize_sample(acc);
    }
  }
}

ImageBuffer resize_prepare(const ImageBuffer& img, int out_w, int out_h) {
  validate(img);
  if (out_w < 1 || out_h < 1) {
    throw InvalidParam("output dimensions must be positive, got " +
                       std::to_string(out_w) + "x" + std::to_string(out_h));
  }
  ImageBuffer dst;
  dst.width = out_w;
  dst.height = out_h;
  dst.pixels.resize(static_cast<std::size_t>(out_w) * out_h *
                    ImageBuffer::kChannels);
  return dst;
}

}  // namespace

ImageBuffer resize_bicubic(const ImageBuffer& img, int out_w, int out_h) {
  if (out_w == img.width && out_h == img.height) {
    validate(img);
    return img;
  }
  ImageBuffer dst = resize_prepare(img, out_w, out_h);
  const std::vector<AxisTap> xt = make_taps(img.width, out_w);
  const std::vector<AxisTap> yt = make_taps(img.height, out_h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_h; ++y) {
    resize_row(img, xt, yt[static_cast<std::size_t>(y)], y, dst);
  }
  return dst;
}

namespace ref {

ImageBuffer resize_bicubic(const ImageBuffer& img, int out_w, int out_h) {
  if (out_w == img.width && out_h == img.height) {
    validate(img);
    return img;
  }
  ImageBuffer dst = resize_prepare(img, out_w, out_h);
  const std::vector<AxisTap> xt = make_taps(img.width, out_w);
  const std::vector<AxisTap> yt = make_taps(img.height, out_h);
  for (int y = 0; y < out_h; ++y) {
    resize_row(img, xt, yt[static_cast<std::size_t>(y)], y, dst);
  }
  return dst;
}

}  // namespace ref

}  // namespace fdb
