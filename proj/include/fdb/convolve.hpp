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

#include <vector>

#include "fdb/image.hpp"

namespace fdb {

// Per-channel 2-D convolution (kernel flipped), reflect-101 borders, output
// rounded half away from zero and clamped. Even kernel dims -> InvalidParam.
ImageBuffer convolve2d(const ImageBuffer& img, const Kernel2D& kernel);

// Separable Gaussian with radius ceil(3*sigma), taps normalized to sum 1,
// reflect-101 borders. sigma <= 0 -> InvalidParam.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);

// Line blur: `length` points rasterized through the kernel centre along
// `angle_deg` in [0,180), each with weight 1/length. length < 1 ->
// InvalidParam.
ImageBuffer motion_blur(const ImageBuffer& img, int length, double angle_deg);

// 1-D Gaussian taps for radius ceil(3*sigma), normalized to sum 1.
std::vector<double> gaussian_taps(double sigma);

// The rasterized line kernel used by motion_blur, in a bounding box of
// (odd ceil(L|cos|)) x (odd ceil(L|sin|)).
Kernel2D motion_line_kernel(int length, double angle_deg);

namespace ref {
// Serial twins; bitwise-identical to the parallel kernels.
ImageBuffer convolve2d(const ImageBuffer& img, const Kernel2D& kernel);
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);
}  // namespace ref

}  // namespace fdb
