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

#ifndef ROBKIT_IMAGE_H_
#define ROBKIT_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace robkit {

// Decoded raster image: row-major, channel-interleaved intensities in [0,1].
// 1 channel (grayscale) or 3 (RGB). Kernels clamp before returning.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c),
        pixels(static_cast<size_t>(w) * h * c, fill) {}

  float& At(int y, int x, int c) {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float At(int y, int x, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  size_t PixelValueCount() const { return pixels.size(); }
  bool SameGeometry(const ImageBuffer& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  void ClampInPlace();
  bool IsValid() const;
};

// PNG-compatible lossless IO; decode also accepts JPEG input trees.
// 16-bit sources are reduced to 8, palette expanded, alpha dropped.
ImageBuffer DecodeImage(const std::vector<uint8_t>& bytes);
ImageBuffer LoadImage(const std::filesystem::path& path);
std::vector<uint8_t> EncodePng(const ImageBuffer& img);
void SavePng(const ImageBuffer& img, const std::filesystem::path& path);

// Round-trip through the JPEG codec at the given quality; the result is
// returned decoded so callers can store it losslessly.
ImageBuffer JpegRoundTrip(const ImageBuffer& img, int quality);

// Bilinear with half-pixel centers. When a downscale factor exceeds 2 on an
// axis, a gaussian pre-blur (sigma = factor/2) antialiases that axis.
ImageBuffer ResizeBilinear(const ImageBuffer& img, int out_w, int out_h,
                           bool antialias = true);

// Separable gaussian, radius = ceil(3*sigma), mirrored borders.
ImageBuffer GaussianBlur(const ImageBuffer& img, double sigma);

// Bilinear sample with mirrored (reflect-101) borders; x/y in pixel coords.
float SampleBilinearReflect(const ImageBuffer& img, double x, double y, int c);

// Rec.601 luma for RGB; identity for single-channel images.
std::vector<float> Luminance(const ImageBuffer& img);

void RgbToHsv(float r, float g, float b, float* h, float* s, float* v);
void HsvToRgb(float h, float s, float v, float* r, float* g, float* b);

ImageBuffer GrayToRgb(const ImageBuffer& img);
ImageBuffer RgbToGray(const ImageBuffer& img);

}  // namespace robkit

#endif  // ROBKIT_IMAGE_H_
