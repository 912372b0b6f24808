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

#include "fdb/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "fdb/codec.hpp"
#include "fdb/convolve.hpp"
#include "fdb/resample.hpp"

namespace fdb {

const std::array<DegradationKind, 8> kAllKinds = {
    DegradationKind::MultiGenJpeg, DegradationKind::DownUpScale,
    DegradationKind::GaussianBlur, DegradationKind::MotionBlur,
    DegradationKind::SaltPepper,   DegradationKind::ChannelClip,
    DegradationKind::ScreenRecapture, DegradationKind::None,
};

namespace {

constexpr const char* kKindLabels[] = {
    "multi_gen_jpeg", "down_up_scale", "gaussian_blur",  "motion_blur",
    "salt_pepper",    "channel_clip",  "screen_recapture", "none",
};

template <typename T, std::size_t N>
bool on_grid(const std::array<T, N>& grid, T v) {
  return std::find(grid.begin(), grid.end(), v) != grid.end();
}

template <typename T, std::size_t N>
T draw_from(const std::array<T, N>& grid, SplitMix64& rng) {
  return grid[static_cast<std::size_t>(rng.next_below(N))];
}

}  // namespace

std::string kind_label(DegradationKind kind) {
  return kKindLabels[static_cast<int>(kind)];
}

DegradationKind kind_from_label(const std::string& label) {
  for (std::size_t i = 0; i < kAllKinds.size(); ++i) {
    if (label == kKindLabels[i]) return kAllKinds[i];
  }
  throw InvalidParam("unknown degradation kind '" + label + "'");
}

DegradationSpec sample_spec(DegradationKind kind, Seed seed) {
  if (kind == DegradationKind::None) {
    throw InvalidParam("sample_spec is undefined for kind none");
  }
  // Draw order per kind is fixed; reordering would silently change every
  // seeded experiment.
  SplitMix64 rng(seed);
  DegradationSpec spec;
  spec.kind = kind;
  switch (kind) {
    case DegradationKind::MultiGenJpeg: {
      MultiGenJpegParams p;
      p.cycles = draw_from(grids::kJpegCycles, rng);
      p.qualities.reserve(static_cast<std::size_t>(p.cycles));
      for (int i = 0; i < p.cycles; ++i) {
        p.qualities.push_back(draw_from(grids::kJpegQualities, rng));
      }
      spec.params = std::move(p);
      break;
    }
    case DegradationKind::DownUpScale:
      spec.params = DownUpScaleParams{draw_from(grids::kScaleFactors, rng)};
      break;
    case DegradationKind::GaussianBlur:
      spec.params = GaussianBlurParams{draw_from(grids::kBlurSigmas, rng)};
      break;
    case DegradationKind::MotionBlur: {
      MotionBlurParams p;
      p.length_px = draw_from(grids::kMotionLengths, rng);
      p.angle_deg = rng.next_unit() * 180.0;
      spec.params = p;
      break;
    }
    case DegradationKind::SaltPepper:
      spec.params = SaltPepperParams{draw_from(grids::kNoiseDensities, rng)};
      break;
    case DegradationKind::ChannelClip: {
      ChannelClipParams p;
      for (int c = 0; c < 3; ++c) {
        p.deltas[static_cast<std::size_t>(c)] =
            draw_from(grids::kClipDeltas, rng);
      }
      spec.params = p;
      break;
    }
    case DegradationKind::ScreenRecapture:
      // Stage parameters come from the fixed defaults table; no draws.
      spec.params = ScreenRecaptureParams{};
      break;
    case DegradationKind::None:
      break;
  }
  return spec;
}

void validate(const DegradationSpec& spec) {
  if (spec.params.index() != static_cast<std::size_t>(spec.kind)) {
    throw InvalidParam("spec params do not match kind " +
                       kind_label(spec.kind));
  }
  switch (spec.kind) {
    case DegradationKind::MultiGenJpeg: {
      const auto& p = std::get<MultiGenJpegParams>(spec.params);
      if (!on_grid(grids::kJpegCycles, p.cycles)) {
        throw InvalidParam("cycles off grid: " + std::to_string(p.cycles));
      }
      if (p.qualities.size() != static_cast<std::size_t>(p.cycles)) {
        throw InvalidParam("qualities length must equal cycles");
      }
      for (int q : p.qualities) {
        if (!on_grid(grids::kJpegQualities, q)) {
          throw InvalidParam("quality off grid: " + std::to_string(q));
        }
      }
      break;
    }
    case DegradationKind::DownUpScale: {
      const auto& p = std::get<DownUpScaleParams>(spec.params);
      if (!on_grid(grids::kScaleFactors, p.factor)) {
        throw InvalidParam("factor off grid: " + std::to_string(p.factor));
      }
      break;
    }
    case DegradationKind::GaussianBlur: {
      const auto& p = std::get<GaussianBlurParams>(spec.params);
      if (!on_grid(grids::kBlurSigmas, p.sigma)) {
        throw InvalidParam("sigma off grid: " + std::to_string(p.sigma));
      }
      break;
    }
    case DegradationKind::MotionBlur: {
      const auto& p = std::get<MotionBlurParams>(spec.params);
      if (!on_grid(grids::kMotionLengths, p.length_px)) {
        throw InvalidParam("length off grid: " + std::to_string(p.length_px));
      }
      if (!(p.angle_deg >= 0.0 && p.angle_deg < 180.0)) {
        throw InvalidParam("angle must be in [0,180)");
      }
      break;
    }
    case DegradationKind::SaltPepper: {
      const auto& p = std::get<SaltPepperParams>(spec.params);
      if (!on_grid(grids::kNoiseDensities, p.p)) {
        throw InvalidParam("p off grid: " + std::to_string(p.p));
      }
      break;
    }
    case DegradationKind::ChannelClip: {
      const auto& p = std::get<ChannelClipParams>(spec.params);
      for (int d : p.deltas) {
        if (!on_grid(grids::kClipDeltas, d)) {
          throw InvalidParam("delta off grid: " + std::to_string(d));
        }
      }
      break;
    }
    case DegradationKind::ScreenRecapture: {
      const auto& p = std::get<ScreenRecaptureParams>(spec.params);
      if (p.grid_period != 0 && p.grid_period < 2) {
        throw InvalidParam("grid_period must be 0 (disabled) or >= 2");
      }
      if (!(p.moire_freq >= 0.0) || !(p.moire_amp >= 0.0)) {
        throw InvalidParam("moire parameters must be >= 0");
      }
      if (!(p.reflect_strength >= 0.0 && p.reflect_strength <= 1.0)) {
        throw InvalidParam("reflect_strength must be in [0,1]");
      }
      if (p.recapture_quality < 1 || p.recapture_quality > 100) {
        throw InvalidParam("recapture_quality must be in [1,100]");
      }
      break;
    }
    case DegradationKind::None:
      break;
  }
}

nlohmann::json spec_to_json(const DegradationSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      [&params](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MultiGenJpegParams>) {
          params["cycles"] = p.cycles;
          params["qualities"] = p.qualities;
        } else if constexpr (std::is_same_v<T, DownUpScaleParams>) {
          params["factor"] = p.factor;
        } else if constexpr (std::is_same_v<T, GaussianBlurParams>) {
          params["sigma"] = p.sigma;
        } else if constexpr (std::is_same_v<T, MotionBlurParams>) {
          params["length_px"] = p.length_px;
          params["angle_deg"] = p.angle_deg;
        } else if constexpr (std::is_same_v<T, SaltPepperParams>) {
          params["p"] = p.p;
        } else if constexpr (std::is_same_v<T, ChannelClipParams>) {
          params["deltas"] = p.deltas;
        } else if constexpr (std::is_same_v<T, ScreenRecaptureParams>) {
          params["grid_period"] = p.grid_period;
          params["moire_freq"] = p.moire_freq;
          params["moire_amp"] = p.moire_amp;
          params["reflect_strength"] = p.reflect_strength;
          params["recapture_quality"] = p.recapture_quality;
        }
      },
      spec.params);
  return nlohmann::json{{"kind", kind_label(spec.kind)}, {"params", params}};
}

DegradationSpec spec_from_json(const nlohmann::json& j) {
  DegradationSpec spec;
  try {
    spec.kind = kind_from_label(j.at("kind").get<std::string>());
    const nlohmann::json& p = j.at("params");
    switch (spec.kind) {
      case DegradationKind::MultiGenJpeg:
        spec.params = MultiGenJpegParams{
            p.at("cycles").get<int>(),
            p.at("qualities").get<std::vector<int>>()};
        break;
      case DegradationKind::DownUpScale:
        spec.params = DownUpScaleParams{p.at("factor").get<int>()};
        break;
      case DegradationKind::GaussianBlur:
        spec.params = GaussianBlurParams{p.at("sigma").get<double>()};
        break;
      case DegradationKind::MotionBlur:
        spec.params = MotionBlurParams{p.at("length_px").get<int>(),
                                       p.at("angle_deg").get<double>()};
        break;
      case DegradationKind::SaltPepper:
        spec.params = SaltPepperParams{p.at("p").get<double>()};
        break;
      case DegradationKind::ChannelClip:
        spec.params =
            ChannelClipParams{p.at("deltas").get<std::array<int, 3>>()};
        break;
      case DegradationKind::ScreenRecapture:
        spec.params = ScreenRecaptureParams{
            p.at("grid_period").get<int>(),
            p.at("moire_freq").get<double>(),
            p.at("moire_amp").get<double>(),
            p.at("reflect_strength").get<double>(),
            p.at("recapture_quality").get<int>()};
        break;
      case DegradationKind::None:
        spec.params = NoneParams{};
        break;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed degradation spec: ") +
                          e.what());
  } catch (const Error& e) {
    throw ValidationError(std::string("malformed degradation spec: ") +
                          e.what());
  }
  return spec;
}

ImageBuffer multi_gen_jpeg(const ImageBuffer& img, int cycles,
                           const std::vector<int>& qualities) {
  validate(img);
  if (cycles < 1) throw InvalidParam("cycles must be >= 1");
  if (qualities.size() != static_cast<std::size_t>(cycles)) {
    throw InvalidParam("qualities length " +
                       std::to_string(qualities.size()) +
                       " does not match cycles " + std::to_string(cycles));
  }
  ImageBuffer out = img;
  for (int q : qualities) out = jpeg_roundtrip(out, q);
  return out;
}

ImageBuffer down_up_scale(const ImageBuffer& img, int factor) {
  validate(img);
  if (factor < 1) throw InvalidParam("factor must be >= 1");
  if (img.width < factor || img.height < factor) {
    throw InvalidParam("image smaller than scale factor");
  }
  // Ceiling division: factor 6 on odd sizes never collapses to zero.
  const int dw = (img.width + factor - 1) / factor;
  const int dh = (img.height + factor - 1) / factor;
  return resize_bicubic(resize_bicubic(img, dw, dh), img.width, img.height);
}

namespace {

// Whole-pixel replacement. Draw 2i decides replacement, draw 2i+1 the
// polarity; indexing by pixel position keeps parallel and serial output
// identical.
inline void salt_pepper_pixel(std::size_t i, double p, Seed seed,
                              ImageBuffer& out) {
  if (unit_at(seed, 2 * i) >= p) return;
  const std::uint8_t v = unit_at(seed, 2 * i + 1) < 0.5 ? 0 : 255;
  const std::size_t base = i * ImageBuffer::kChannels;
  out.pixels[base] = v;
  out.pixels[base + 1] = v;
  out.pixels[base + 2] = v;
}

}  // namespace

ImageBuffer salt_pepper(const ImageBuffer& img, double p, Seed seed) {
  validate(img);
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParam("p must be in [0,1]");
  ImageBuffer out = img;
  const std::size_t n = img.pixel_count();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    salt_pepper_pixel(static_cast<std::size_t>(i), p, seed, out);
  }
  return out;
}

namespace ref {

ImageBuffer salt_pepper(const ImageBuffer& img, double p, Seed seed) {
  validate(img);
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParam("p must be in [0,1]");
  ImageBuffer out = img;
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    salt_pepper_pixel(i, p, seed, out);
  }
  return out;
}

}  // namespace ref

ImageBuffer channel_clip(const ImageBuffer& img,
                         const std::array<int, 3>& deltas) {
  validate(img);
  ImageBuffer out = img;
  const std::size_t n = img.pixel_count();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    const std::size_t base = static_cast<std::size_t>(i) *
                             ImageBuffer::kChannels;
    for (int c = 0; c < ImageBuffer::kChannels; ++c) {
      const int v = static_cast<int>(img.pixels[base + c]) +
                    deltas[static_cast<std::size_t>(c)];
      out.pixels[base + c] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return out;
}

ImageBuffer screen_recapture(const ImageBuffer& img,
                             const ScreenRecaptureParams& params, Seed seed) {
  validate(img);
  DegradationSpec probe;
  probe.kind = DegradationKind::ScreenRecapture;
  probe.params = params;
  validate(probe);

  const int w = img.width;
  const int h = img.height;
  // Stages 1..3 accumulate in doubles, clamped after each stage; a single
  // quantization feeds the recompression stage.
  std::vector<double> buf(img.pixels.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = img.pixels[i];

  const int corner = static_cast<int>(hash_at(seed, 0) & 3);
  const double two_pi = 2.0 * std::acos(-1.0);
  const double ramp_peak = params.reflect_strength * 60.0;

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t base = img.index(x, y, 0);
      // Stage 1: subpixel grid. A pixel on both a darkened row and a
      // darkened column is darkened twice.
      double grid = 1.0;
      if (params.grid_period != 0) {
        if (y % params.grid_period == 0) grid *= 0.85;
        if (x % params.grid_period == 0) grid *= 0.85;
      }
      // Stage 2: moire interference along the diagonal.
      const double moire =
          params.moire_amp * std::sin(two_pi * params.moire_freq * (x + y));
      // Stage 3: reflection ramp peaking in the seeded corner.
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      const double cu = (corner & 1) ? 1.0 - u : u;
      const double cv = (corner & 2) ? 1.0 - v : v;
      const double ramp = ramp_peak * (1.0 - 0.5 * (cu + cv));
      for (int c = 0; c < ImageBuffer::kChannels; ++c) {
        double s = buf[base + c] * grid;
        s = std::clamp(s, 0.0, 255.0);
        s = std::clamp(s + moire, 0.0, 255.0);
        s = std::clamp(s + ramp, 0.0, 255.0);
        buf[base + c] = s;
      }
    }
  }

  ImageBuffer staged = img;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    staged.pixels[i] = quantize_sample(buf[i]);
  }
  // Stage 4: recompression.
  return jpeg_roundtrip(staged, params.recapture_quality);
}

ImageBuffer apply(const ImageBuffer& img, const DegradationSpec& spec,
                  Seed seed) {
  validate(img);
  validate(spec);
  ImageBuffer out;
  switch (spec.kind) {
    case DegradationKind::MultiGenJpeg: {
      const auto& p = std::get<MultiGenJpegParams>(spec.params);
      out = multi_gen_jpeg(img, p.cycles, p.qualities);
      break;
    }
    case DegradationKind::DownUpScale:
      out = down_up_scale(img, std::get<DownUpScaleParams>(spec.params).factor);
      break;
    case DegradationKind::GaussianBlur:
      out = gaussian_blur(img, std::get<GaussianBlurParams>(spec.params).sigma);
      break;
    case DegradationKind::MotionBlur: {
      const auto& p = std::get<MotionBlurParams>(spec.params);
      out = motion_blur(img, p.length_px, p.angle_deg);
      break;
    }
    case DegradationKind::SaltPepper:
      out = salt_pepper(img, std::get<SaltPepperParams>(spec.params).p, seed);
      break;
    case DegradationKind::ChannelClip:
      out = channel_clip(img, std::get<ChannelClipParams>(spec.params).deltas);
      break;
    case DegradationKind::ScreenRecapture:
      out = screen_recapture(
          img, std::get<ScreenRecaptureParams>(spec.params), seed);
      break;
    case DegradationKind::None:
      out = img;
      break;
  }
  if (!out.same_dims(img)) {
    throw ShapeError("degradation changed image dimensions");
  }
  return out;
}

}  // namespace fdb
