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
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdb/image.hpp"
#include "fdb/rng.hpp"

namespace fdb {

enum class DegradationKind {
  MultiGenJpeg,
  DownUpScale,
  GaussianBlur,
  MotionBlur,
  SaltPepper,
  ChannelClip,
  ScreenRecapture,
  None,
};

// All eight kinds, in canonical order.
extern const std::array<DegradationKind, 8> kAllKinds;

// snake_case wire labels: multi_gen_jpeg, down_up_scale, gaussian_blur,
// motion_blur, salt_pepper, channel_clip, screen_recapture, none.
std::string kind_label(DegradationKind kind);
DegradationKind kind_from_label(const std::string& label);

// Parameter grids. sample_spec draws uniformly from these.
namespace grids {
inline constexpr std::array<int, 5> kJpegCycles = {4, 5, 6, 7, 8};
inline constexpr std::array<int, 5> kJpegQualities = {8, 12, 16, 20, 25};
inline constexpr std::array<int, 4> kScaleFactors = {3, 4, 5, 6};
inline constexpr std::array<double, 5> kBlurSigmas = {2.5, 3.5, 4.5, 5.5, 6.5};
inline constexpr std::array<int, 4> kMotionLengths = {8, 12, 16, 20};
inline constexpr std::array<double, 4> kNoiseDensities = {0.008, 0.012, 0.016,
                                                          0.020};
inline constexpr std::array<int, 6> kClipDeltas = {-35, -25, -15, 15, 25, 35};
}  // namespace grids

struct MultiGenJpegParams {
  int cycles = 0;
  std::vector<int> qualities;  // one per cycle
  bool operator==(const MultiGenJpegParams&) const = default;
};

struct DownUpScaleParams {
  int factor = 0;
  bool operator==(const DownUpScaleParams&) const = default;
};

struct GaussianBlurParams {
  double sigma = 0.0;
  bool operator==(const GaussianBlurParams&) const = default;
};

struct MotionBlurParams {
  int length_px = 0;
  double angle_deg = 0.0;
  bool operator==(const MotionBlurParams&) const = default;
};

struct SaltPepperParams {
  double p = 0.0;
  bool operator==(const SaltPepperParams&) const = default;
};

struct ChannelClipParams {
  std::array<int, 3> deltas = {0, 0, 0};
  bool operator==(const ChannelClipParams&) const = default;
};

struct ScreenRecaptureParams {
  // grid_period == 0 disables the pixel-grid stage.
  int grid_period = 3;
  double moire_freq = 0.11;
  double moire_amp = 18.0;
  double reflect_strength = 0.35;
  int recapture_quality = 60;
  bool operator==(const ScreenRecaptureParams&) const = default;
};

struct NoneParams {
  bool operator==(const NoneParams&) const = default;
};

struct DegradationSpec {
  DegradationKind kind = DegradationKind::None;
  std::variant<MultiGenJpegParams, DownUpScaleParams, GaussianBlurParams,
               MotionBlurParams, SaltPepperParams, ChannelClipParams,
               ScreenRecaptureParams, NoneParams>
      params = NoneParams{};
  bool operator==(const DegradationSpec&) const = default;
};

// Draws a spec for `kind` from the published grids. The draw order per kind
// is fixed; equal seeds give equal specs.
DegradationSpec sample_spec(DegradationKind kind, Seed seed);

// Throws InvalidParam unless the params record matches `kind` and every
// grid-valued parameter is on its published grid. ScreenRecapture has no
// published grid; its record is checked for legality only (grid_period 0 or
// >= 2, reflect_strength in [0,1], quality in [1,100], amp/freq >= 0).
void validate(const DegradationSpec& spec);

// Wire form {kind, params}; params keys are cycles, qualities, factor,
// sigma, length_px, angle_deg, p, deltas, grid_period, moire_freq,
// moire_amp, reflect_strength, recapture_quality.
nlohmann::json spec_to_json(const DegradationSpec& spec);
DegradationSpec spec_from_json(const nlohmann::json& j);

// Operators. Each validates its own loose preconditions (e.g. p in [0,1]);
// apply() additionally enforces grid membership.
ImageBuffer multi_gen_jpeg(const ImageBuffer& img, int cycles,
                           const std::vector<int>& qualities);
ImageBuffer down_up_scale(const ImageBuffer& img, int factor);
ImageBuffer salt_pepper(const ImageBuffer& img, double p, Seed seed);
ImageBuffer channel_clip(const ImageBuffer& img,
                         const std::array<int, 3>& deltas);
ImageBuffer screen_recapture(const ImageBuffer& img,
                             const ScreenRecaptureParams& params, Seed seed);
// gaussian_blur and motion_blur live in convolve.hpp.

// Dispatches on spec.kind after strict grid validation; None returns a copy.
// `seed` feeds the stochastic stages (salt_pepper draws, recapture corner).
ImageBuffer apply(const ImageBuffer& img, const DegradationSpec& spec,
                  Seed seed);

namespace ref {
// Serial twin; bitwise-identical to the parallel kernel.
ImageBuffer salt_pepper(const ImageBuffer& img, double p, Seed seed);
}  // namespace ref

}  // namespace fdb
