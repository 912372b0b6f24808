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

#include "fdb/image.hpp"

namespace fdb {

// Catmull-Rom bicubic (a = -0.5), pixel-centre source mapping
// sx = (x + 0.5) * in/out - 0.5, clamp-to-edge sampling. A same-size call
// returns the input unchanged. Zero output dimension -> InvalidParam.
ImageBuffer resize_bicubic(const ImageBuffer& img, int out_w, int out_h);

namespace ref {
// Serial twin of the parallel kernel; bitwise-identical output. Kept for
// parity tests and as the benchmark baseline.
ImageBuffer resize_bicubic(const ImageBuffer& img, int out_w, int out_h);
}  // namespace ref

}  // namespace fdb
