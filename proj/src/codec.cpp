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

#include "fdb/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "fdb/errors.hpp"

namespace fdb {
namespace {

// State shared with the C error callbacks. It lives in the frame of the
// public wrapper, not the setjmp frame, so longjmp cannot leave it with an
// indeterminate value; the impl frames below hold PODs only.
struct CodecCtx {
  char message[512] = {0};
  unsigned char* jpeg_buf = nullptr;  // jpeg_mem_dest allocation
  unsigned long jpeg_len = 0;
  png_bytep* rows = nullptr;
};

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf env;
  CodecCtx* ctx;
};

void jpeg_error_exit_cb(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, mgr->ctx->message);
  std::longjmp(mgr->env, 1);
}

void jpeg_emit_nothing_cb(j_common_ptr, int) {}

// Pinned decode settings. The integer slow DCT keeps output identical
// across builds and architectures.
void pin_decompress(jpeg_decompress_struct* cinfo) {
  cinfo->out_color_space = JCS_RGB;
  cinfo->dct_method = JDCT_ISLOW;
  cinfo->do_fancy_upsampling = TRUE;
}

bool decode_jpeg_impl(const unsigned char* data, std::size_t size,
                      ImageBuffer* out, CodecCtx* ctx) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit_cb;
  jerr.pub.emit_message = jpeg_emit_nothing_cb;
  jerr.ctx = ctx;

  if (setjmp(jerr.env)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, size);
  jpeg_read_header(&cinfo, TRUE);
  pin_decompress(&cinfo);
  jpeg_start_decompress(&cinfo);

  out->width = static_cast<int>(cinfo.output_width);
  out->height = static_cast<int>(cinfo.output_height);
  out->pixels.assign(static_cast<std::size_t>(out->width) * out->height *
                         ImageBuffer::kChannels,
                     0);
  const std::size_t stride =
      static_cast<std::size_t>(out->width) * cinfo.output_components;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out->pixels.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

bool encode_jpeg_impl(const ImageBuffer& img, int quality,
                      std::vector<unsigned char>* out, CodecCtx* ctx) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit_cb;
  jerr.pub.emit_message = jpeg_emit_nothing_cb;
  jerr.ctx = ctx;

  if (setjmp(jerr.env)) {
    jpeg_destroy_compress(&cinfo);
    return false;
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &ctx->jpeg_buf, &ctx->jpeg_len);

  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = ImageBuffer::kChannels;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  // Baseline sequential Huffman with standard tables scaled by quality;
  // defaults already give 4:2:0 chroma subsampling for YCbCr.
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;

  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride =
      static_cast<std::size_t>(img.width) * ImageBuffer::kChannels;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row =
        const_cast<JSAMPROW>(img.pixels.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  out->assign(ctx->jpeg_buf, ctx->jpeg_buf + ctx->jpeg_len);
  return true;
}

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<CodecCtx*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct PngReadState {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t count) {
  auto* s = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (count > s->size - s->offset) {
    png_error(png, "unexpected end of PNG stream");
  }
  std::memcpy(out, s->data + s->offset, count);
  s->offset += count;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t count) {
  auto* v = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
  v->insert(v->end(), data, data + count);
}

void png_flush_cb(png_structp) {}

bool decode_png_impl(PngReadState* state, ImageBuffer* out, CodecCtx* ctx) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx,
                                           png_error_cb, png_warning_cb);
  if (!png) {
    std::snprintf(ctx->message, sizeof(ctx->message), "png alloc failed");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::snprintf(ctx->message, sizeof(ctx->message), "png alloc failed");
    return false;
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  png_set_read_fn(png, state, png_read_cb);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (w == 0 || h == 0 || w > 1u << 24 || h > 1u << 24) {
    png_error(png, "unsupported PNG dimensions");
  }

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  (void)png_set_interlace_handling(png);
  png_read_update_info(png, info);
  if (png_get_channels(png, info) != 3) {
    png_error(png, "unexpected channel count after transforms");
  }

  out->width = static_cast<int>(w);
  out->height = static_cast<int>(h);
  out->pixels.assign(static_cast<std::size_t>(w) * h * ImageBuffer::kChannels,
                     0);
  ctx->rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * h));
  if (!ctx->rows) png_error(png, "out of memory");
  const std::size_t stride =
      static_cast<std::size_t>(w) * ImageBuffer::kChannels;
  for (png_uint_32 y = 0; y < h; ++y) {
    ctx->rows[y] = out->pixels.data() + y * stride;
  }
  png_read_image(png, ctx->rows);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_png_impl(const ImageBuffer& img, std::vector<unsigned char>* out,
                     CodecCtx* ctx) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx,
                                            png_error_cb, png_warning_cb);
  if (!png) {
    std::snprintf(ctx->message, sizeof(ctx->message), "png alloc failed");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::snprintf(ctx->message, sizeof(ctx->message), "png alloc failed");
    return false;
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }

  png_set_write_fn(png, out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  ctx->rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) *
                                                  img.height));
  if (!ctx->rows) png_error(png, "out of memory");
  const std::size_t stride =
      static_cast<std::size_t>(img.width) * ImageBuffer::kChannels;
  for (int y = 0; y < img.height; ++y) {
    ctx->rows[y] = const_cast<png_bytep>(img.pixels.data() + y * stride);
  }
  png_write_image(png, ctx->rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

bool has_png_magic(const unsigned char* data, std::size_t size) {
  static const unsigned char kMagic[8] = {0x89, 'P', 'N', 'G',
                                          0x0d, 0x0a, 0x1a, 0x0a};
  return size >= 8 && std::memcmp(data, kMagic, 8) == 0;
}

bool has_jpeg_magic(const unsigned char* data, std::size_t size) {
  return size >= 2 && data[0] == 0xff && data[1] == 0xd8;
}

}  // namespace

ImageBuffer decode_jpeg(const unsigned char* data, std::size_t size) {
  ImageBuffer img;
  CodecCtx ctx;
  const bool ok = decode_jpeg_impl(data, size, &img, &ctx);
  if (!ok) {
    throw DecodeError(std::string("jpeg decode failed: ") + ctx.message);
  }
  validate(img);
  return img;
}

std::vector<unsigned char> encode_jpeg(const ImageBuffer& img, int quality) {
  validate(img);
  if (quality < 1 || quality > 100) {
    throw InvalidParam("jpeg quality must be in [1,100], got " +
                       std::to_string(quality));
  }
  std::vector<unsigned char> out;
  CodecCtx ctx;
  const bool ok = encode_jpeg_impl(img, quality, &out, &ctx);
  std::free(ctx.jpeg_buf);
  if (!ok) {
    throw DecodeError(std::string("jpeg encode failed: ") + ctx.message);
  }
  return out;
}

ImageBuffer decode_png(const unsigned char* data, std::size_t size) {
  ImageBuffer img;
  CodecCtx ctx;
  PngReadState state{data, size, 0};
  const bool ok = decode_png_impl(&state, &img, &ctx);
  std::free(ctx.rows);
  if (!ok) {
    throw DecodeError(std::string("png decode failed: ") + ctx.message);
  }
  validate(img);
  return img;
}

std::vector<unsigned char> encode_png(const ImageBuffer& img) {
  validate(img);
  std::vector<unsigned char> out;
  CodecCtx ctx;
  const bool ok = encode_png_impl(img, &out, &ctx);
  std::free(ctx.rows);
  if (!ok) {
    throw DecodeError(std::string("png encode failed: ") + ctx.message);
  }
  return out;
}

ImageBuffer decode_image(const unsigned char* data, std::size_t size) {
  if (has_png_magic(data, size)) return decode_png(data, size);
  if (has_jpeg_magic(data, size)) return decode_jpeg(data, size);
  throw DecodeError("unrecognized image magic bytes");
}

ImageBuffer load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failed for " + path.string());
  if (bytes.empty()) throw DecodeError("empty file " + path.string());
  return decode_image(bytes.data(), bytes.size());
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path,
                ImageFormat format, int quality) {
  std::vector<unsigned char> bytes = format == ImageFormat::png
                                         ? encode_png(img)
                                         : encode_jpeg(img, quality);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality) {
  const std::vector<unsigned char> bytes = encode_jpeg(img, quality);
  ImageBuffer out = decode_jpeg(bytes.data(), bytes.size());
  if (!out.same_dims(img)) {
    throw DecodeError("jpeg roundtrip changed dimensions");
  }
  return out;
}

}  // namespace fdb
