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
#include <filesystem>
#include <vector>

#include "fdb/image.hpp"

namespace fdb {

enum class ImageFormat { png, jpeg };

// Decodes a PNG or JPEG file (sniffed by magic bytes). Grayscale sources are
// replicated into three channels; alpha is dropped. Missing or unreadable
// file -> IoError; unparseable bytes -> DecodeError.
ImageBuffer load_image(const std::filesystem::path& path);

// Writes the buffer in the given format. PNG round-trips bit-exactly through
// load_image. JPEG requires quality in [1,100] -> InvalidParam otherwise.
void save_image(const ImageBuffer& img, const std::filesystem::path& path,
                ImageFormat format, int quality = 0);

// decode(encode(img, quality)): one compression generation. Codec settings
// are pinned (baseline sequential, 4:2:0, standard tables scaled by quality,
// integer slow DCT) so repeated generations reproduce bit-exactly.
ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality);

// In-memory codecs. These back the file operations and jpeg_roundtrip.
std::vector<unsigned char> encode_jpeg(const ImageBuffer& img, int quality);
std::vector<unsigned char> encode_png(const ImageBuffer& img);
ImageBuffer decode_jpeg(const unsigned char* data, std::size_t size);
ImageBuffer decode_png(const unsigned char* data, std::size_t size);
ImageBuffer decode_image(const unsigned char* data, std::size_t size);

}  // namespace fdb
