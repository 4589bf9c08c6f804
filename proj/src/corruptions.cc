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

#include "robkit/corruptions.h"

#include <algorithm>
#include <cmath>

#include "robkit/error.h"
#include "robkit/rng.h"

namespace robkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct KindInfo {
  CorruptionKind kind;
  std::string_view name;
  CorruptionCategory category;
  bool stochastic;
};

// Category assignment follows the ported taxonomy with weather pinned to
// exactly {snow, frost, fog}, which is what the medical profile excludes;
// brightness therefore sits with the digital kinds.
constexpr std::array<KindInfo, kNumCorruptionKinds> kKindInfo = {{
    {CorruptionKind::kGaussianNoise, "gaussian_noise",
     CorruptionCategory::kNoise, true},
    {CorruptionKind::kShotNoise, "shot_noise", CorruptionCategory::kNoise,
     true},
    {CorruptionKind::kImpulseNoise, "impulse_noise",
     CorruptionCategory::kNoise, true},
    {CorruptionKind::kDefocusBlur, "defocus_blur", CorruptionCategory::kBlur,
     false},
    {CorruptionKind::kGlassBlur, "glass_blur", CorruptionCategory::kBlur,
     true},
    {CorruptionKind::kMotionBlur, "motion_blur", CorruptionCategory::kBlur,
     false},
    {CorruptionKind::kZoomBlur, "zoom_blur", CorruptionCategory::kBlur, false},
    {CorruptionKind::kSnow, "snow", CorruptionCategory::kWeather, true},
    {CorruptionKind::kFrost, "frost", CorruptionCategory::kWeather, true},
    {CorruptionKind::kFog, "fog", CorruptionCategory::kWeather, true},
    {CorruptionKind::kBrightness, "brightness", CorruptionCategory::kDigital,
     false},
    {CorruptionKind::kContrast, "contrast", CorruptionCategory::kDigital,
     false},
    {CorruptionKind::kElasticTransform, "elastic_transform",
     CorruptionCategory::kDigital, true},
    {CorruptionKind::kPixelate, "pixelate", CorruptionCategory::kDigital,
     false},
    {CorruptionKind::kJpegCompression, "jpeg_compression",
     CorruptionCategory::kDigital, false},
}};

const KindInfo& Info(CorruptionKind kind) {
  return kKindInfo[static_cast<size_t>(kind)];
}

int NextPow2(int v) {
  int n = 1;
  while (n < v) n <<= 1;
  return n;
}

// Diamond-square plasma on a wrap-around grid, normalized to [0,1]. The
// displacement amplitude shrinks by `decay` per octave.
std::vector<float> PlasmaFractal(int n, double decay, Rng& rng) {
  std::vector<double> g(static_cast<size_t>(n) * n, 0.0);
  auto at = [&](int y, int x) -> double& {
    return g[static_cast<size_t>(((y % n) + n) % n) * n + (((x % n) + n) % n)];
  };
  double wibble = 100.0;
  for (int step = n; step >= 2; step /= 2) {
    const int half = step / 2;
    for (int y = 0; y < n; y += step) {
      for (int x = 0; x < n; x += step) {
        const double mean =
            (at(y, x) + at(y + step, x) + at(y, x + step) +
             at(y + step, x + step)) /
            4.0;
        at(y + half, x + half) = mean + wibble * rng.Uniform(-1.0, 1.0);
      }
    }
    for (int y = 0; y < n; y += step) {
      for (int x = 0; x < n; x += step) {
        const double mean = (at(y, x) + at(y, x + step) +
                             at(y + half, x + half) + at(y - half, x + half)) /
                            4.0;
        at(y, x + half) = mean + wibble * rng.Uniform(-1.0, 1.0);
      }
    }
    for (int y = 0; y < n; y += step) {
      for (int x = 0; x < n; x += step) {
        const double mean = (at(y, x) + at(y + step, x) +
                             at(y + half, x + half) + at(y + half, x - half)) /
                            4.0;
        at(y + half, x) = mean + wibble * rng.Uniform(-1.0, 1.0);
      }
    }
    wibble /= decay;
  }
  double lo = g[0], hi = g[0];
  for (const double v : g) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<float> out(g.size(), 0.0f);
  if (hi > lo) {
    for (size_t i = 0; i < g.size(); ++i) {
      out[i] = static_cast<float>((g[i] - lo) / (hi - lo));
    }
  }
  return out;
}

// Center-crop to ceil(dim/z) per axis, then resize back: the zoomed-in view.
ImageBuffer ClippedZoom(const ImageBuffer& img, double zoom) {
  if (zoom <= 1.0) return img;
  const int ch = static_cast<int>(std::ceil(img.height / zoom));
  const int cw = static_cast<int>(std::ceil(img.width / zoom));
  const int top = (img.height - ch) / 2;
  const int left = (img.width - cw) / 2;
  ImageBuffer crop(cw, ch, img.channels);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        crop.At(y, x, c) = img.At(top + y, left + x, c);
      }
    }
  }
  return ResizeBilinear(crop, img.width, img.height, /*antialias=*/false);
}

// One-sided smear: output = weighted sum of samples at offsets 0..radius
// along the blur direction, gaussian-weighted.
ImageBuffer MotionBlurKernel(const ImageBuffer& img, double radius,
                             double sigma, double angle_deg) {
  const int taps = std::max(1, static_cast<int>(std::lround(radius)));
  std::vector<float> w(static_cast<size_t>(taps) + 1);
  double sum = 0.0;
  for (int i = 0; i <= taps; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    w[static_cast<size_t>(i)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : w) v = static_cast<float>(v / sum);
  const double theta = angle_deg * kPi / 180.0;
  const double dx = std::cos(theta);
  const double dy = -std::sin(theta);
  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        float acc = 0.0f;
        for (int i = 0; i <= taps; ++i) {
          acc += w[static_cast<size_t>(i)] *
                 SampleBilinearReflect(img, x - i * dx, y - i * dy, c);
        }
        out.At(y, x, c) = acc;
      }
    }
  }
  return out;
}

ImageBuffer GaussianNoise(const ImageBuffer& img, const LevelParams& p,
                          Rng& rng) {
  const double sigma = p.Get("sigma");
  ImageBuffer out = img;
  for (auto& v : out.pixels) {
    v = static_cast<float>(v + sigma * rng.Normal());
  }
  return out;
}

ImageBuffer ShotNoise(const ImageBuffer& img, const LevelParams& p, Rng& rng) {
  const double photons = p.Get("photons");
  ImageBuffer out = img;
  for (auto& v : out.pixels) {
    v = static_cast<float>(rng.Poisson(v * photons) / photons);
  }
  return out;
}

ImageBuffer ImpulseNoise(const ImageBuffer& img, const LevelParams& p,
                         Rng& rng) {
  const double amount = p.Get("amount");
  ImageBuffer out = img;
  for (auto& v : out.pixels) {
    const double u = rng.Uniform();
    if (u < amount * 0.5) {
      v = 0.0f;
    } else if (u < amount) {
      v = 1.0f;
    }
  }
  return out;
}

ImageBuffer DefocusBlur(const ImageBuffer& img, const LevelParams& p) {
  const double radius = p.Get("radius");
  const double alias = p.Get("alias_blur");
  const int half = radius <= 8.0 ? 8 : static_cast<int>(std::ceil(radius));
  const int n = 2 * half + 1;
  std::vector<double> disk(static_cast<size_t>(n) * n, 0.0);
  int count = 0;
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) {
      if (x * x + y * y <= radius * radius) {
        disk[static_cast<size_t>(y + half) * n + (x + half)] = 1.0;
        ++count;
      }
    }
  }
  for (auto& v : disk) v /= count;

  // Antialias the aperture with a small gaussian, then renormalize.
  if (alias > 0.0) {
    const int gr = radius <= 8.0 ? 1 : 2;
    std::vector<double> gw(static_cast<size_t>(2 * gr + 1));
    double gsum = 0.0;
    for (int i = -gr; i <= gr; ++i) {
      gw[static_cast<size_t>(i + gr)] = std::exp(-0.5 * i * i / (alias * alias));
      gsum += gw[static_cast<size_t>(i + gr)];
    }
    for (auto& v : gw) v /= gsum;
    std::vector<double> tmp(disk.size(), 0.0);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int i = -gr; i <= gr; ++i) {
          const int xx = x + i;
          if (xx >= 0 && xx < n) {
            acc += gw[static_cast<size_t>(i + gr)] *
                   disk[static_cast<size_t>(y) * n + xx];
          }
        }
        tmp[static_cast<size_t>(y) * n + x] = acc;
      }
    }
    std::vector<double> blurred(disk.size(), 0.0);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int i = -gr; i <= gr; ++i) {
          const int yy = y + i;
          if (yy >= 0 && yy < n) {
            acc += gw[static_cast<size_t>(i + gr)] *
                   tmp[static_cast<size_t>(yy) * n + x];
          }
        }
        blurred[static_cast<size_t>(y) * n + x] = acc;
      }
    }
    double bsum = 0.0;
    for (const double v : blurred) bsum += v;
    for (auto& v : blurred) v /= bsum;
    disk = std::move(blurred);
  }

  // Crop near-zero margins to keep the convolution cheap.
  int lo = half, hi = half;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (disk[static_cast<size_t>(y) * n + x] > 1e-12) {
        lo = std::min({lo, y, x});
        hi = std::max({hi, y, x});
      }
    }
  }
  const int r0 = std::max(half - lo, hi - half);
  const int m = 2 * r0 + 1;
  std::vector<float> kernel(static_cast<size_t>(m) * m);
  for (int y = 0; y < m; ++y) {
    for (int x = 0; x < m; ++x) {
      kernel[static_cast<size_t>(y) * m + x] = static_cast<float>(
          disk[static_cast<size_t>(y + half - r0) * n + (x + half - r0)]);
    }
  }

  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        float acc = 0.0f;
        for (int ky = -r0; ky <= r0; ++ky) {
          for (int kx = -r0; kx <= r0; ++kx) {
            acc += kernel[static_cast<size_t>(ky + r0) * m + (kx + r0)] *
                   SampleBilinearReflect(img, x + kx, y + ky, c);
          }
        }
        out.At(y, x, c) = acc;
      }
    }
  }
  return out;
}

ImageBuffer GlassBlur(const ImageBuffer& img, const LevelParams& p, Rng& rng) {
  const double sigma = p.Get("sigma");
  const int delta = static_cast<int>(p.Get("max_delta"));
  const int iterations = static_cast<int>(p.Get("iterations"));
  ImageBuffer out = GaussianBlur(img, sigma);
  const int w = img.width, h = img.height, c = img.channels;
  for (int it = 0; it < iterations; ++it) {
    for (int y = h - delta - 1; y >= delta; --y) {
      for (int x = w - delta - 1; x >= delta; --x) {
        const int dy = static_cast<int>(rng.UniformInt(-delta, delta));
        const int dx = static_cast<int>(rng.UniformInt(-delta, delta));
        for (int ch = 0; ch < c; ++ch) {
          std::swap(out.At(y, x, ch), out.At(y + dy, x + dx, ch));
        }
      }
    }
  }
  return GaussianBlur(out, sigma);
}

ImageBuffer ZoomBlur(const ImageBuffer& img, const LevelParams& p) {
  const double max_factor = p.Get("max_factor");
  const double step = p.Get("step");
  const int n = static_cast<int>(std::lround((max_factor - 1.0) / step)) + 1;
  std::vector<double> acc(img.pixels.size(), 0.0);
  for (size_t i = 0; i < acc.size(); ++i) acc[i] = img.pixels[i];
  for (int k = 0; k < n; ++k) {
    const ImageBuffer zoomed = ClippedZoom(img, 1.0 + k * step);
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += zoomed.pixels[i];
  }
  ImageBuffer out = img;
  const double inv = 1.0 / (n + 1);
  for (size_t i = 0; i < acc.size(); ++i) {
    out.pixels[i] = static_cast<float>(acc[i] * inv);
  }
  return out;
}

ImageBuffer Snow(const ImageBuffer& rgb, const LevelParams& p, Rng& rng) {
  const double mean = p.Get("layer_mean");
  const double sig = p.Get("layer_sigma");
  const double zoom = p.Get("layer_zoom");
  const double threshold = p.Get("threshold");
  const double blur_radius = p.Get("blur_radius");
  const double blur_sigma = p.Get("blur_sigma");
  const double blend = p.Get("blend");

  ImageBuffer layer(rgb.width, rgb.height, 1);
  for (auto& v : layer.pixels) {
    v = static_cast<float>(mean + sig * rng.Normal());
  }
  layer = ClippedZoom(layer, zoom);
  for (auto& v : layer.pixels) {
    v = v < threshold ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  }
  const double angle = rng.Uniform(-135.0, -45.0);
  layer = MotionBlurKernel(layer, blur_radius, blur_sigma, angle);

  const auto luma = Luminance(rgb);
  ImageBuffer out = rgb;
  const size_t npx = luma.size();
  for (size_t i = 0; i < npx; ++i) {
    const float whitened = std::min(1.5f * luma[i] + 0.5f, 1.0f);
    const size_t li = i;  // layer is single-channel
    const float snow2 =
        layer.pixels[li] +
        layer.pixels[(npx - 1 - li)];  // layer + its 180-degree rotation
    for (int c = 0; c < rgb.channels; ++c) {
      const float base = rgb.pixels[i * rgb.channels + c];
      const float mixed = static_cast<float>(
          blend * base + (1.0 - blend) * std::max(base, whitened));
      out.pixels[i * rgb.channels + c] = mixed + snow2;
    }
  }
  return out;
}

// Ridged plasma stands in for a frost texture photo; optional user files
// override it via CorruptionContext.
ImageBuffer ProceduralFrostTexture(int width, int height, Rng& rng) {
  const int n = NextPow2(std::max({width, height, 32}));
  const auto plasma = PlasmaFractal(n, 2.0, rng);
  const int max_y = n - height;
  const int max_x = n - width;
  const int off_y =
      max_y > 0 ? static_cast<int>(rng.UniformInt(0, max_y - 1)) : 0;
  const int off_x =
      max_x > 0 ? static_cast<int>(rng.UniformInt(0, max_x - 1)) : 0;
  ImageBuffer tex(width, height, 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float v = plasma[static_cast<size_t>(y + off_y) * n + (x + off_x)];
      const float ridged = 1.0f - std::fabs(2.0f * v - 1.0f);
      tex.At(y, x, 0) = ridged * ridged;
    }
  }
  return tex;
}

ImageBuffer Frost(const ImageBuffer& img, const LevelParams& p, Rng& rng,
                  const CorruptionContext& ctx) {
  const double image_scale = p.Get("image_scale");
  const double frost_scale = p.Get("frost_scale");
  ImageBuffer tex;
  if (!ctx.frost_textures.empty()) {
    const size_t idx = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(ctx.frost_textures.size()) - 1));
    ImageBuffer full = LoadImage(ctx.frost_textures[idx]);
    if (full.channels != 1) full = RgbToGray(full);
    if (full.width < img.width || full.height < img.height) {
      throw ValidationError("frost texture " +
                            ctx.frost_textures[idx].string() +
                            " cannot cover the image");
    }
    const int off_y = full.height > img.height
                          ? static_cast<int>(rng.UniformInt(0, full.height - img.height - 1))
                          : 0;
    const int off_x = full.width > img.width
                          ? static_cast<int>(rng.UniformInt(0, full.width - img.width - 1))
                          : 0;
    tex = ImageBuffer(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        tex.At(y, x, 0) = full.At(y + off_y, x + off_x, 0);
      }
    }
  } else {
    tex = ProceduralFrostTexture(img.width, img.height, rng);
  }
  ImageBuffer out = img;
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < npx; ++i) {
    for (int c = 0; c < img.channels; ++c) {
      out.pixels[i * img.channels + c] = static_cast<float>(
          image_scale * img.pixels[i * img.channels + c] +
          frost_scale * tex.pixels[i]);
    }
  }
  return out;
}

ImageBuffer Fog(const ImageBuffer& img, const LevelParams& p, Rng& rng) {
  const double intensity = p.Get("intensity");
  const double decay = p.Get("wibble_decay");
  const int n = NextPow2(std::max({img.width, img.height, 2}));
  const auto plasma = PlasmaFractal(n, decay, rng);
  float max_val = 0.0f;
  for (const float v : img.pixels) max_val = std::max(max_val, v);
  ImageBuffer out = img;
  if (max_val <= 0.0f) return out;
  const float scale = static_cast<float>(max_val / (max_val + intensity));
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < npx; ++i) {
    const int y = static_cast<int>(i) / img.width;
    const int x = static_cast<int>(i) % img.width;
    const float fog_v = static_cast<float>(
        intensity * plasma[static_cast<size_t>(y) * n + x]);
    for (int c = 0; c < img.channels; ++c) {
      out.pixels[i * img.channels + c] =
          (img.pixels[i * img.channels + c] + fog_v) * scale;
    }
  }
  return out;
}

ImageBuffer Brightness(const ImageBuffer& img, const LevelParams& p) {
  const double delta = p.Get("delta");
  ImageBuffer out = img;
  if (img.channels == 1) {
    for (auto& v : out.pixels) v = static_cast<float>(v + delta);
    return out;
  }
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < npx; ++i) {
    float h, s, v;
    RgbToHsv(img.pixels[i * 3], img.pixels[i * 3 + 1], img.pixels[i * 3 + 2],
             &h, &s, &v);
    v = std::clamp(static_cast<float>(v + delta), 0.0f, 1.0f);
    HsvToRgb(h, s, v, &out.pixels[i * 3], &out.pixels[i * 3 + 1],
             &out.pixels[i * 3 + 2]);
  }
  return out;
}

ImageBuffer Contrast(const ImageBuffer& img, const LevelParams& p) {
  const double factor = p.Get("factor");
  double mean[3] = {0, 0, 0};
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < npx; ++i) {
    for (int c = 0; c < img.channels; ++c) {
      mean[c] += img.pixels[i * img.channels + c];
    }
  }
  for (int c = 0; c < img.channels; ++c) mean[c] /= static_cast<double>(npx);
  ImageBuffer out = img;
  for (size_t i = 0; i < npx; ++i) {
    for (int c = 0; c < img.channels; ++c) {
      out.pixels[i * img.channels + c] = static_cast<float>(
          (img.pixels[i * img.channels + c] - mean[c]) * factor + mean[c]);
    }
  }
  return out;
}

ImageBuffer ElasticTransform(const ImageBuffer& img, const LevelParams& p,
                             Rng& rng) {
  const int w = img.width, h = img.height;
  const double scale = std::min(w, h);
  const double alpha = p.Get("displacement_frac") * scale;
  const double sigma = p.Get("smooth_frac") * scale;
  const double affine = p.Get("affine_frac") * scale;

  // Random affine from three jittered control points around the center.
  const double cx = w / 2.0, cy = h / 2.0;
  const double s3 = scale / 3.0;
  const double src_pts[3][2] = {
      {cx + s3, cy + s3}, {cx + s3, cy - s3}, {cx - s3, cy - s3}};
  double dst_pts[3][2];
  for (auto& pt : dst_pts) {
    pt[0] = 0.0;
    pt[1] = 0.0;
  }
  for (int i = 0; i < 3; ++i) {
    dst_pts[i][0] = src_pts[i][0] + rng.Uniform(-affine, affine);
    dst_pts[i][1] = src_pts[i][1] + rng.Uniform(-affine, affine);
  }
  // Solve dst = A*src + t for the two rows of [A|t], then invert so we can
  // pull each output pixel from the source.
  auto solve_row = [&](int coord, double* row) {
    // 3 equations: row . (sx, sy, 1) = dst[coord]
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
      m[i][0] = src_pts[i][0];
      m[i][1] = src_pts[i][1];
      m[i][2] = 1.0;
      m[i][3] = dst_pts[i][coord];
    }
    for (int col = 0; col < 3; ++col) {
      int pivot = col;
      for (int r = col + 1; r < 3; ++r) {
        if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
      }
      std::swap(m[col], m[pivot]);
      for (int r = 0; r < 3; ++r) {
        if (r == col || m[col][col] == 0.0) continue;
        const double f = m[r][col] / m[col][col];
        for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
      }
    }
    for (int i = 0; i < 3; ++i) row[i] = m[i][3] / m[i][i];
  };
  double fwd[2][3];
  solve_row(0, fwd[0]);
  solve_row(1, fwd[1]);
  // Invert the 2x3 affine.
  const double det = fwd[0][0] * fwd[1][1] - fwd[0][1] * fwd[1][0];
  const double ia = fwd[1][1] / det, ib = -fwd[0][1] / det;
  const double ic = -fwd[1][0] / det, id = fwd[0][0] / det;
  const double itx = -(ia * fwd[0][2] + ib * fwd[1][2]);
  const double ity = -(ic * fwd[0][2] + id * fwd[1][2]);

  ImageBuffer warped(w, h, img.channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = ia * x + ib * y + itx;
      const double sy = ic * x + id * y + ity;
      for (int c = 0; c < img.channels; ++c) {
        warped.At(y, x, c) = SampleBilinearReflect(img, sx, sy, c);
      }
    }
  }
  if (alpha <= 0.0) return warped;

  ImageBuffer dx(w, h, 1), dy(w, h, 1);
  for (auto& v : dx.pixels) v = static_cast<float>(rng.Uniform(-1.0, 1.0));
  for (auto& v : dy.pixels) v = static_cast<float>(rng.Uniform(-1.0, 1.0));
  dx = GaussianBlur(dx, sigma);
  dy = GaussianBlur(dy, sigma);

  ImageBuffer out(w, h, img.channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ox = x + alpha * dx.At(y, x, 0);
      const double oy = y + alpha * dy.At(y, x, 0);
      for (int c = 0; c < img.channels; ++c) {
        out.At(y, x, c) = SampleBilinearReflect(warped, ox, oy, c);
      }
    }
  }
  return out;
}

ImageBuffer Pixelate(const ImageBuffer& img, const LevelParams& p) {
  const double scale = p.Get("scale");
  const int dw = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int dh = std::max(1, static_cast<int>(std::lround(img.height * scale)));
  const ImageBuffer down = ResizeBilinear(img, dw, dh, /*antialias=*/false);
  return ResizeBilinear(down, img.width, img.height, /*antialias=*/false);
}

ImageBuffer Jpeg(const ImageBuffer& img, const LevelParams& p) {
  return JpegRoundTrip(img, static_cast<int>(p.Get("quality")));
}

}  // namespace

const std::array<CorruptionKind, kNumCorruptionKinds>& AllCorruptionKinds() {
  static const std::array<CorruptionKind, kNumCorruptionKinds> kinds = [] {
    std::array<CorruptionKind, kNumCorruptionKinds> a{};
    for (int i = 0; i < kNumCorruptionKinds; ++i) {
      a[static_cast<size_t>(i)] = kKindInfo[static_cast<size_t>(i)].kind;
    }
    return a;
  }();
  return kinds;
}

std::string_view KindName(CorruptionKind kind) { return Info(kind).name; }

CorruptionKind KindFromName(std::string_view name) {
  for (const auto& info : kKindInfo) {
    if (info.name == name) return info.kind;
  }
  throw ValidationError("unknown corruption kind: \"" + std::string(name) +
                        "\"");
}

CorruptionCategory KindCategory(CorruptionKind kind) {
  return Info(kind).category;
}

bool IsWeather(CorruptionKind kind) {
  return Info(kind).category == CorruptionCategory::kWeather;
}

bool IsStochastic(CorruptionKind kind) { return Info(kind).stochastic; }

std::string_view ProfileName(CorruptionProfile p) {
  return p == CorruptionProfile::kNatural ? "natural" : "medical";
}

CorruptionProfile ProfileFromName(std::string_view name) {
  if (name == "natural") return CorruptionProfile::kNatural;
  if (name == "medical") return CorruptionProfile::kMedical;
  throw ValidationError("unknown corruption profile: \"" + std::string(name) +
                        "\"");
}

std::vector<CorruptionKind> KindsForProfile(CorruptionProfile profile) {
  std::vector<CorruptionKind> kinds;
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    if (profile == CorruptionProfile::kMedical && IsWeather(kind)) continue;
    kinds.push_back(kind);
  }
  return kinds;
}

ImageBuffer ApplyCorruption(const ImageBuffer& image,
                            const CorruptionSpec& spec,
                            const CorruptionContext& ctx) {
  if (spec.severity < 1 || spec.severity > 5) {
    throw ValidationError("severity must lie in [1,5], got " +
                          std::to_string(spec.severity));
  }
  if (image.width <= 0 || image.height <= 0 ||
      (image.channels != 1 && image.channels != 3) ||
      image.pixels.size() !=
          static_cast<size_t>(image.width) * image.height * image.channels) {
    throw ValidationError("corruption input violates image invariants");
  }
  const std::string profile =
      SeverityTable::ProfileForGeometry(image.width, image.height);
  const LevelParams& p =
      ctx.table->Level(profile, std::string(KindName(spec.kind)), spec.severity);
  Rng rng(spec.seed);

  // Weather kinds are defined on RGB; single-channel input round-trips
  // through a replicated image and comes back as luminance.
  const bool gray_weather = image.channels == 1 && IsWeather(spec.kind);
  const ImageBuffer& input = gray_weather ? GrayToRgb(image) : image;

  ImageBuffer out;
  switch (spec.kind) {
    case CorruptionKind::kGaussianNoise: out = GaussianNoise(input, p, rng); break;
    case CorruptionKind::kShotNoise: out = ShotNoise(input, p, rng); break;
    case CorruptionKind::kImpulseNoise: out = ImpulseNoise(input, p, rng); break;
    case CorruptionKind::kDefocusBlur: out = DefocusBlur(input, p); break;
    case CorruptionKind::kGlassBlur: out = GlassBlur(input, p, rng); break;
    case CorruptionKind::kMotionBlur:
      out = MotionBlurKernel(input, p.Get("radius"), p.Get("sigma"),
                             p.Get("angle"));
      break;
    case CorruptionKind::kZoomBlur: out = ZoomBlur(input, p); break;
    case CorruptionKind::kSnow: out = Snow(input, p, rng); break;
    case CorruptionKind::kFrost: out = Frost(input, p, rng, ctx); break;
    case CorruptionKind::kFog: out = Fog(input, p, rng); break;
    case CorruptionKind::kBrightness: out = Brightness(input, p); break;
    case CorruptionKind::kContrast: out = Contrast(input, p); break;
    case CorruptionKind::kElasticTransform:
      out = ElasticTransform(input, p, rng);
      break;
    case CorruptionKind::kPixelate: out = Pixelate(input, p); break;
    case CorruptionKind::kJpegCompression: out = Jpeg(input, p); break;
  }
  if (gray_weather) out = RgbToGray(out);
  out.ClampInPlace();
  return out;
}

}  // namespace robkit
