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

#include "fdb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fdb/codec.hpp"

namespace fs = std::filesystem;

namespace fdb::synth {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct FaceParams {
  double bg;           // background gray
  double skin_r, skin_g, skin_b;
  double ax, ay;       // face half-axes, fraction of min(w,h)
  double eye_dx;       // eye offset from centre, fraction of ax
  double eye_dy;       // above centre, fraction of ay
  double eye_r;        // fraction of ax
  double mouth_w;      // fraction of ax
  double mouth_dy;     // below centre, fraction of ay
  double mouth_t;      // half thickness, fraction of ay
  double hair_line;    // fraction of ay above centre where hair starts
  double hair_gray;
  // Background carries an identity-specific low-frequency wave so the
  // 16x16 mock embedding separates identities cleanly.
  double wave_fx, wave_fy;    // cycles across the canvas
  double wave_px, wave_py;    // phases
  double wave_amp;
  // Per-variant:
  double jitter_x, jitter_y;  // pixels
  double light;               // horizontal lighting amplitude, levels
  double bg_shift;
};

FaceParams draw_params(Seed identity_seed, int variant) {
  SplitMix64 rng(identity_seed);
  FaceParams p;
  p.bg = 40.0 + static_cast<double>(rng.next_below(160));
  p.skin_r = 160.0 + static_cast<double>(rng.next_below(70));
  p.skin_g = p.skin_r - 25.0 - static_cast<double>(rng.next_below(35));
  p.skin_b = p.skin_g - 20.0 - static_cast<double>(rng.next_below(30));
  p.ax = 0.26 + 0.14 * rng.next_unit();
  p.ay = 0.30 + 0.14 * rng.next_unit();
  p.eye_dx = 0.35 + 0.18 * rng.next_unit();
  p.eye_dy = 0.18 + 0.14 * rng.next_unit();
  p.eye_r = 0.10 + 0.06 * rng.next_unit();
  p.mouth_w = 0.38 + 0.22 * rng.next_unit();
  p.mouth_dy = 0.42 + 0.14 * rng.next_unit();
  p.mouth_t = 0.05 + 0.04 * rng.next_unit();
  p.hair_line = 0.55 + 0.25 * rng.next_unit();
  p.hair_gray = 20.0 + static_cast<double>(rng.next_below(70));
  p.wave_fx = 0.5 + 2.0 * rng.next_unit();
  p.wave_fy = 0.5 + 2.0 * rng.next_unit();
  p.wave_px = rng.next_unit();
  p.wave_py = rng.next_unit();
  p.wave_amp = 18.0 + 14.0 * rng.next_unit();

  SplitMix64 vrng(hash_at(identity_seed, 0x5eedu + static_cast<Seed>(variant)));
  p.jitter_x = (vrng.next_unit() - 0.5) * 4.0;
  p.jitter_y = (vrng.next_unit() - 0.5) * 4.0;
  p.light = (vrng.next_unit() - 0.5) * 12.0;
  p.bg_shift = (vrng.next_unit() - 0.5) * 8.0;
  return p;
}

}  // namespace

ImageBuffer make_face(Seed identity_seed, int variant, int width, int height) {
  if (width < 16 || height < 16) {
    throw InvalidParam("face canvas must be at least 16x16");
  }
  const FaceParams p = draw_params(identity_seed, variant);
  const double scale = std::min(width, height);
  const double cx = width / 2.0 + p.jitter_x;
  const double cy = height / 2.0 + p.jitter_y;
  const double ax = p.ax * scale;
  const double ay = p.ay * scale;

  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height *
                    ImageBuffer::kChannels);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
      const double v =
          height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
      const double light = p.light * (u - 0.5);
      const double wave =
          p.wave_amp * (std::sin(2.0 * kPi * (p.wave_fx * u + p.wave_px)) +
                        std::sin(2.0 * kPi * (p.wave_fy * v + p.wave_py)));
      double r = p.bg + p.bg_shift + light + wave;
      double g = r, b = r;

      const double fx = (x - cx) / ax;
      const double fy = (y - cy) / ay;
      if (fx * fx + fy * fy <= 1.0) {
        // Skin with a gentle vertical shade.
        const double shade = 1.0 - 0.12 * (fy + 1.0) / 2.0;
        r = p.skin_r * shade + light;
        g = p.skin_g * shade + light;
        b = p.skin_b * shade + light;
        if (fy < -p.hair_line) {
          r = g = b = p.hair_gray + light;
        } else {
          const double eye_y = cy - p.eye_dy * ay;
          const double eye_r2 = p.eye_r * ax * p.eye_r * ax;
          for (double side : {-1.0, 1.0}) {
            const double ex = cx + side * p.eye_dx * ax;
            const double dx = x - ex;
            const double dy = y - eye_y;
            if (dx * dx + dy * dy <= eye_r2) {
              r = 32.0;
              g = 28.0;
              b = 28.0;
            }
          }
          // Nose: a narrow column between the eyes and the mouth.
          const double nose_hw = 0.05 * ax;
          if (std::abs(x - cx) <= nose_hw && y > eye_y + p.eye_r * ax &&
              fy < p.mouth_dy - 2.0 * p.mouth_t) {
            r *= 0.85;
            g *= 0.85;
            b *= 0.85;
          }
          const double mouth_y = cy + p.mouth_dy * ay;
          const double mx = (x - cx) / (p.mouth_w * ax);
          const double my = (y - mouth_y) / (p.mouth_t * ay);
          if (mx * mx + my * my <= 1.0) {
            r = 150.0;
            g = 52.0;
            b = 58.0;
          }
        }
      }
      const std::size_t base = img.index(x, y, 0);
      img.pixels[base] = quantize_sample(r);
      img.pixels[base + 1] = quantize_sample(g);
      img.pixels[base + 2] = quantize_sample(b);
    }
  }
  return img;
}

void write_fixture(const fs::path& root, int identities, Seed seed, int width,
                   int height) {
  if (identities < 1) throw InvalidParam("need at least one identity");
  fs::create_directories(root);
  for (int i = 0; i < identities; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "person_%02d", i);
    const fs::path dir = root / name;
    fs::create_directories(dir);
    const Seed identity_seed = hash_at(seed, static_cast<Seed>(i));
    save_image(make_face(identity_seed, 0, width, height), dir / "a_ref.png",
               ImageFormat::png);
    save_image(make_face(identity_seed, 1, width, height),
               dir / "b_probe.png", ImageFormat::png);
  }
}

}  // namespace fdb::synth
