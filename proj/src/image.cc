// Copyright (c) the robkit project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robkit/image.h"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include "robkit/error.h"
#include "robkit/io_util.h"

namespace robkit {

namespace {

constexpr float kInv255 = 1.0f / 255.0f;

inline uint8_t ToByte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<uint8_t>(std::lround(c * 255.0f));
}

// Reflect-101 index mirroring: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
inline int Reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

struct PngMemReader {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void PngReadCallback(png_structp png, png_bytep out, png_size_t count) {
  auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
  if (r->pos + count > r->size) {
    png_error(png, "read past end of PNG buffer");
  }
  std::memcpy(out, r->data + r->pos, count);
  r->pos += count;
}

void PngWriteCallback(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void PngFlushCallback(png_structp) {}

ImageBuffer DecodePng(const std::vector<uint8_t>& bytes) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: failed to create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: failed to create info struct");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png: decode failed");
  }
  PngMemReader reader{bytes.data(), bytes.size(), 0};
  png_set_read_fn(png, &reader, PngReadCallback);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png: unsupported channel count after normalization");
  }

  ImageBuffer img(static_cast<int>(width), static_cast<int>(height), channels);
  std::vector<uint8_t> row(static_cast<size_t>(width) * channels);
  std::vector<png_bytep> row_ptr(1);
  for (png_uint_32 y = 0; y < height; ++y) {
    row_ptr[0] = row.data();
    png_read_rows(png, row_ptr.data(), nullptr, 1);
    float* dst = &img.pixels[static_cast<size_t>(y) * width * channels];
    for (size_t i = 0; i < row.size(); ++i) dst[i] = row[i] * kInv255;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

struct JpegErrorMgr {
  jpeg_error_mgr base;
  jmp_buf jump;
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  longjmp(mgr->jump, 1);
}

ImageBuffer DecodeJpeg(const std::vector<uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("jpeg: decode failed");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int c = cinfo.output_components;
  if (c != 1 && c != 3) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("jpeg: unsupported component count");
  }
  ImageBuffer img(w, h, c);
  std::vector<uint8_t> row(static_cast<size_t>(w) * c);
  JSAMPROW row_ptr[1] = {row.data()};
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    jpeg_read_scanlines(&cinfo, row_ptr, 1);
    float* dst = &img.pixels[static_cast<size_t>(y) * w * c];
    for (size_t i = 0; i < row.size(); ++i) dst[i] = row[i] * kInv255;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

std::vector<uint8_t> EncodeJpeg(const ImageBuffer& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  unsigned char* out_buf = nullptr;
  unsigned long out_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (out_buf) free(out_buf);
    throw IoError("jpeg: encode failed");
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out_buf, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = img.channels;
  cinfo.in_color_space = img.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);

  std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
  JSAMPROW row_ptr[1] = {row.data()};
  for (int y = 0; y < img.height; ++y) {
    const float* src =
        &img.pixels[static_cast<size_t>(y) * img.width * img.channels];
    for (size_t i = 0; i < row.size(); ++i) row[i] = ToByte(src[i]);
    jpeg_write_scanlines(&cinfo, row_ptr, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<uint8_t> result(out_buf, out_buf + out_size);
  jpeg_destroy_compress(&cinfo);
  free(out_buf);
  return result;
}

// Separable gaussian with independent per-axis sigmas.
ImageBuffer GaussianBlurXY(const ImageBuffer& img, double sigma_x,
                           double sigma_y) {
  auto kernel = [](double sigma) {
    std::vector<float> k;
    if (sigma <= 0.0) {
      k.push_back(1.0f);
      return k;
    }
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    k.resize(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
      k[static_cast<size_t>(i + radius)] = static_cast<float>(w);
      sum += w;
    }
    for (auto& v : k) v = static_cast<float>(v / sum);
    return k;
  };

  const int w = img.width, h = img.height, c = img.channels;
  ImageBuffer tmp = img;
  if (sigma_x > 0.0) {
    const auto kx = kernel(sigma_x);
    const int r = (static_cast<int>(kx.size()) - 1) / 2;
    ImageBuffer out(w, h, c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < c; ++ch) {
          float acc = 0.0f;
          for (int i = -r; i <= r; ++i) {
            acc += kx[static_cast<size_t>(i + r)] *
                   img.At(y, Reflect(x + i, w), ch);
          }
          out.At(y, x, ch) = acc;
        }
      }
    }
    tmp = std::move(out);
  }
  if (sigma_y > 0.0) {
    const auto ky = kernel(sigma_y);
    const int r = (static_cast<int>(ky.size()) - 1) / 2;
    ImageBuffer out(w, h, c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < c; ++ch) {
          float acc = 0.0f;
          for (int i = -r; i <= r; ++i) {
            acc += ky[static_cast<size_t>(i + r)] *
                   tmp.At(Reflect(y + i, h), x, ch);
          }
          out.At(y, x, ch) = acc;
        }
      }
    }
    tmp = std::move(out);
  }
  return tmp;
}

}  // namespace

void ImageBuffer::ClampInPlace() {
  for (auto& v : pixels) v = std::clamp(v, 0.0f, 1.0f);
}

bool ImageBuffer::IsValid() const {
  if (width <= 0 || height <= 0) return false;
  if (channels != 1 && channels != 3) return false;
  if (pixels.size() != static_cast<size_t>(width) * height * channels) {
    return false;
  }
  for (const float v : pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) return false;
  }
  return true;
}

ImageBuffer DecodeImage(const std::vector<uint8_t>& bytes) {
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' &&
      bytes[2] == 'N' && bytes[3] == 'G') {
    return DecodePng(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return DecodeJpeg(bytes);
  }
  throw IoError("unrecognized image format (expected PNG or JPEG)");
}

ImageBuffer LoadImage(const std::filesystem::path& path) {
  try {
    return DecodeImage(ReadFileBytes(path));
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + " [" + path.string() + "]");
  }
}

std::vector<uint8_t> EncodePng(const ImageBuffer& img) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  if (!png) throw IoError("png: failed to create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: failed to create info struct");
  }
  std::vector<uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: encode failed");
  }
  png_set_write_fn(png, &out, PngWriteCallback, PngFlushCallback);
  const int color_type =
      img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  // Fast deterministic settings; output stays lossless at any level.
  png_set_compression_level(png, 1);
  png_set_filter(png, PNG_FILTER_TYPE_DEFAULT, PNG_FILTER_SUB);
  png_write_info(png, info);

  std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
  for (int y = 0; y < img.height; ++y) {
    const float* src =
        &img.pixels[static_cast<size_t>(y) * img.width * img.channels];
    for (size_t i = 0; i < row.size(); ++i) row[i] = ToByte(src[i]);
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void SavePng(const ImageBuffer& img, const std::filesystem::path& path) {
  const auto bytes = EncodePng(img);
  AtomicWriteBytes(path, bytes.data(), bytes.size());
}

ImageBuffer JpegRoundTrip(const ImageBuffer& img, int quality) {
  return DecodeJpeg(EncodeJpeg(img, quality));
}

float SampleBilinearReflect(const ImageBuffer& img, double x, double y,
                            int c) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const float fx = static_cast<float>(x - x0);
  const float fy = static_cast<float>(y - y0);
  const int x0r = Reflect(x0, img.width);
  const int x1r = Reflect(x0 + 1, img.width);
  const int y0r = Reflect(y0, img.height);
  const int y1r = Reflect(y0 + 1, img.height);
  const float top =
      img.At(y0r, x0r, c) * (1.0f - fx) + img.At(y0r, x1r, c) * fx;
  const float bot =
      img.At(y1r, x0r, c) * (1.0f - fx) + img.At(y1r, x1r, c) * fx;
  return top * (1.0f - fy) + bot * fy;
}

ImageBuffer ResizeBilinear(const ImageBuffer& img, int out_w, int out_h,
                           bool antialias) {
  if (out_w <= 0 || out_h <= 0) {
    throw ValidationError("resize: output size must be positive");
  }
  if (out_w == img.width && out_h == img.height) return img;
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  const ImageBuffer* src = &img;
  ImageBuffer blurred;
  if (antialias && (sx > 2.0 || sy > 2.0)) {
    blurred = GaussianBlurXY(img, sx > 2.0 ? sx / 2.0 : 0.0,
                             sy > 2.0 ? sy / 2.0 : 0.0);
    src = &blurred;
  }
  ImageBuffer out(out_w, out_h, img.channels);
  for (int y = 0; y < out_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < out_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < img.channels; ++c) {
        out.At(y, x, c) = SampleBilinearReflect(*src, src_x, src_y, c);
      }
    }
  }
  out.ClampInPlace();
  return out;
}

ImageBuffer GaussianBlur(const ImageBuffer& img, double sigma) {
  return GaussianBlurXY(img, sigma, sigma);
}

std::vector<float> Luminance(const ImageBuffer& img) {
  std::vector<float> out(static_cast<size_t>(img.width) * img.height);
  if (img.channels == 1) {
    out.assign(img.pixels.begin(), img.pixels.end());
    return out;
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const float* p = &img.pixels[i * 3];
    out[i] = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
  }
  return out;
}

void RgbToHsv(float r, float g, float b, float* h, float* s, float* v) {
  const float mx = std::max({r, g, b});
  const float mn = std::min({r, g, b});
  const float d = mx - mn;
  *v = mx;
  *s = mx <= 0.0f ? 0.0f : d / mx;
  if (d <= 0.0f) {
    *h = 0.0f;
    return;
  }
  float hh;
  if (mx == r) {
    hh = (g - b) / d;
    if (hh < 0.0f) hh += 6.0f;
  } else if (mx == g) {
    hh = (b - r) / d + 2.0f;
  } else {
    hh = (r - g) / d + 4.0f;
  }
  *h = hh / 6.0f;
}

void HsvToRgb(float h, float s, float v, float* r, float* g, float* b) {
  if (s <= 0.0f) {
    *r = *g = *b = v;
    return;
  }
  float hh = h * 6.0f;
  if (hh >= 6.0f) hh = 0.0f;
  const int sector = static_cast<int>(hh);
  const float f = hh - sector;
  const float p = v * (1.0f - s);
  const float q = v * (1.0f - s * f);
  const float t = v * (1.0f - s * (1.0f - f));
  switch (sector) {
    case 0: *r = v; *g = t; *b = p; break;
    case 1: *r = q; *g = v; *b = p; break;
    case 2: *r = p; *g = v; *b = t; break;
    case 3: *r = p; *g = q; *b = v; break;
    case 4: *r = t; *g = p; *b = v; break;
    default: *r = v; *g = p; *b = q; break;
  }
}

ImageBuffer GrayToRgb(const ImageBuffer& img) {
  if (img.channels == 3) return img;
  ImageBuffer out(img.width, img.height, 3);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    out.pixels[i * 3 + 0] = img.pixels[i];
    out.pixels[i * 3 + 1] = img.pixels[i];
    out.pixels[i * 3 + 2] = img.pixels[i];
  }
  return out;
}

ImageBuffer RgbToGray(const ImageBuffer& img) {
  if (img.channels == 1) return img;
  ImageBuffer out(img.width, img.height, 1);
  const auto luma = Luminance(img);
  out.pixels.assign(luma.begin(), luma.end());
  return out;
}

}  // namespace robkit
