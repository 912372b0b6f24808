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

#include "fdb/diffmath.hpp"

#include <cmath>
#include <string>

#include "fdb/errors.hpp"

namespace fdb::diffmath {

LatentShape latent_shape(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw ShapeError("pixel dimensions must be positive");
  }
  if (height % 8 != 0 || width % 8 != 0) {
    throw ShapeError("pixel dimensions must be divisible by 8, got " +
                     std::to_string(height) + "x" + std::to_string(width));
  }
  return LatentShape{16, height / 8, width / 8};
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("matmul inner dimensions " + std::to_string(a.cols) +
                     " and " + std::to_string(b.rows) + " differ");
  }
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

Matrix lora_merge(const Matrix& w0, const Matrix& b, const Matrix& a,
                  double alpha) {
  if (b.cols != a.rows) {
    throw ShapeError("adapter inner dimensions differ: B cols " +
                     std::to_string(b.cols) + " vs A rows " +
                     std::to_string(a.rows));
  }
  if (w0.rows != b.rows || w0.cols != a.cols) {
    throw ShapeError("base matrix shape does not match adapter product");
  }
  if (alpha == 0.0) return w0;
  Matrix update = matmul(b, a);
  Matrix out = w0;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] += alpha * update.data[i];
  }
  return out;
}

std::vector<double> combine_conditioning(const std::vector<double>& text,
                                         const std::vector<double>& image,
                                         double gamma) {
  if (text.size() != image.size()) {
    throw ShapeError("embedding lengths differ: " +
                     std::to_string(text.size()) + " vs " +
                     std::to_string(image.size()));
  }
  std::vector<double> out(text.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = text[i] + gamma * image[i];
  }
  return out;
}

std::vector<double> cfg_combine(const std::vector<double>& cond,
                                const std::vector<double>& uncond, double w) {
  if (cond.size() != uncond.size()) {
    throw ShapeError("prediction lengths differ: " +
                     std::to_string(cond.size()) + " vs " +
                     std::to_string(uncond.size()));
  }
  std::vector<double> out(cond.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 + w) * cond[i] - w * uncond[i];
  }
  return out;
}

std::vector<int> ddim_timesteps(int total_steps, int steps) {
  if (steps < 1 || total_steps < 1 || steps > total_steps) {
    throw InvalidParam("need 1 <= steps <= total_T, got steps=" +
                       std::to_string(steps) + " total_T=" +
                       std::to_string(total_steps));
  }
  const int stride = total_steps / steps;
  std::vector<int> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out[static_cast<std::size_t>(i)] = (total_steps - 1) - i * stride;
  }
  return out;
}

void validate(const GuidanceConfig& config) {
  if (config.rank < 1) throw InvalidParam("rank must be >= 1");
  if (config.steps < 1) throw InvalidParam("steps must be >= 1");
  if (!std::isfinite(config.w) || !std::isfinite(config.gamma) ||
      !std::isfinite(config.alpha)) {
    throw InvalidParam("guidance reals must be finite");
  }
}

}  // namespace fdb::diffmath
