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

#include <cstddef>
#include <vector>

namespace fdb::diffmath {

struct LatentShape {
  int channels = 0;
  int height = 0;
  int width = 0;
  bool operator==(const LatentShape&) const = default;
};

// Pixel (H, W) -> latent (16, H/8, W/8). Dimensions not divisible by 8 or
// not positive -> ShapeError.
LatentShape latent_shape(int height, int width);

// Row-major dense matrix. Kept deliberately small; this module computes
// shapes and scalar mixes, not tensors.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

Matrix matmul(const Matrix& a, const Matrix& b);

// W = W0 + alpha * B A. B is (out, r), A is (r, in), W0 is (out, in).
// Mismatched shapes -> ShapeError.
Matrix lora_merge(const Matrix& w0, const Matrix& b, const Matrix& a,
                  double alpha);

// c = e_t + gamma * e_i, elementwise. Length mismatch -> ShapeError.
std::vector<double> combine_conditioning(const std::vector<double>& text,
                                         const std::vector<double>& image,
                                         double gamma);

// (1 + w) * cond - w * uncond, elementwise. Length mismatch -> ShapeError.
std::vector<double> cfg_combine(const std::vector<double>& cond,
                                const std::vector<double>& uncond, double w);

// `steps` indices from T-1 descending with stride floor(T/steps).
// Requires 1 <= steps <= T; violations -> InvalidParam.
std::vector<int> ddim_timesteps(int total_steps, int steps);

struct GuidanceConfig {
  double w = 2.8;       // guidance weight
  double gamma = 0.12;  // image-embedding weight
  double alpha = 0.8;   // adapter scale
  int rank = 64;
  int steps = 20;
  bool operator==(const GuidanceConfig&) const = default;
};

// Throws InvalidParam unless rank >= 1, steps >= 1, and the real fields are
// finite.
void validate(const GuidanceConfig& config);

}  // namespace fdb::diffmath
