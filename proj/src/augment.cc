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

#include "robkit/augment.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "robkit/error.h"
#include "robkit/rng.h"

namespace robkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void CheckGeometry(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.SameGeometry(b)) {
    throw ValidationError("mix inputs must share geometry");
  }
}

// out = a + (1-lambda)*(b-a): bit-equals `a` at lambda=1 and whenever the
// inputs are identical.
ImageBuffer LerpImages(const ImageBuffer& a, const ImageBuffer& b,
                       double lambda) {
  ImageBuffer out = a;
  const float w = static_cast<float>(1.0 - lambda);
  for (size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] += w * (b.pixels[i] - a.pixels[i]);
  }
  out.ClampInPlace();
  return out;
}

Box SampleCutmixBox(int width, int height, double lambda, Rng& rng) {
  const double cut_ratio = std::sqrt(1.0 - lambda);
  const int cut_w = static_cast<int>(width * cut_ratio);
  const int cut_h = static_cast<int>(height * cut_ratio);
  const int cx = static_cast<int>(rng.UniformInt(0, width - 1));
  const int cy = static_cast<int>(rng.UniformInt(0, height - 1));
  Box box;
  box.x1 = std::clamp(cx - cut_w / 2, 0, width);
  box.x2 = std::clamp(cx + cut_w / 2, 0, width);
  box.y1 = std::clamp(cy - cut_h / 2, 0, height);
  box.y2 = std::clamp(cy + cut_h / 2, 0, height);
  return box;
}

// ---- AugMix primitive ops (float-domain ports of the usual 8-bit ops) ----

ImageBuffer OpRotate(const ImageBuffer& img, double level, Rng& rng) {
  const double max_deg = 30.0;
  double deg = level * max_deg;
  if (rng.Bernoulli(0.5)) deg = -deg;
  const double rad = deg * kPi / 180.0;
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;
  const double c = std::cos(rad), s = std::sin(rad);
  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double sx = c * dx + s * dy + cx;
      const double sy = -s * dx + c * dy + cy;
      const bool inside = sx >= -0.5 && sx <= img.width - 0.5 && sy >= -0.5 &&
                          sy <= img.height - 0.5;
      for (int ch = 0; ch < img.channels; ++ch) {
        out.At(y, x, ch) =
            inside ? SampleBilinearReflect(img, sx, sy, ch) : 0.0f;
      }
    }
  }
  return out;
}

ImageBuffer OpShear(const ImageBuffer& img, double level, bool horizontal,
                    Rng& rng) {
  const double max_shear = 0.3;
  double f = level * max_shear;
  if (rng.Bernoulli(0.5)) f = -f;
  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double sx = horizontal ? x + f * y : x;
      const double sy = horizontal ? y : y + f * x;
      const bool inside = sx >= -0.5 && sx <= img.width - 0.5 && sy >= -0.5 &&
                          sy <= img.height - 0.5;
      for (int ch = 0; ch < img.channels; ++ch) {
        out.At(y, x, ch) =
            inside ? SampleBilinearReflect(img, sx, sy, ch) : 0.0f;
      }
    }
  }
  return out;
}

ImageBuffer OpTranslate(const ImageBuffer& img, double level, bool horizontal,
                        Rng& rng) {
  const double max_shift =
      (horizontal ? img.width : img.height) / 3.0;
  double shift = level * max_shift;
  if (rng.Bernoulli(0.5)) shift = -shift;
  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double sx = horizontal ? x + shift : x;
      const double sy = horizontal ? y : y + shift;
      const bool inside = sx >= -0.5 && sx <= img.width - 0.5 && sy >= -0.5 &&
                          sy <= img.height - 0.5;
      for (int ch = 0; ch < img.channels; ++ch) {
        out.At(y, x, ch) =
            inside ? SampleBilinearReflect(img, sx, sy, ch) : 0.0f;
      }
    }
  }
  return out;
}

ImageBuffer OpPosterize(const ImageBuffer& img, double level) {
  // Keep 8..4 bits as the level grows (8-bit semantics on float data).
  const int drop = std::clamp(static_cast<int>(level * 4.0), 0, 4);
  const int bits = 8 - drop;
  const int mask = 0xFF & ~((1 << (8 - bits)) - 1);
  ImageBuffer out = img;
  for (auto& v : out.pixels) {
    const int byte = static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    v = static_cast<float>(byte & mask) / 255.0f;
  }
  return out;
}

ImageBuffer OpSolarize(const ImageBuffer& img, double level) {
  const float threshold = static_cast<float>(1.0 - level);
  ImageBuffer out = img;
  for (auto& v : out.pixels) {
    if (v >= threshold) v = 1.0f - v;
  }
  return out;
}

ImageBuffer OpAutocontrast(const ImageBuffer& img, double) {
  ImageBuffer out = img;
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (int c = 0; c < img.channels; ++c) {
    float lo = 1.0f, hi = 0.0f;
    for (size_t i = 0; i < npx; ++i) {
      const float v = img.pixels[i * img.channels + c];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi <= lo) continue;
    const float scale = 1.0f / (hi - lo);
    for (size_t i = 0; i < npx; ++i) {
      out.pixels[i * img.channels + c] =
          (img.pixels[i * img.channels + c] - lo) * scale;
    }
  }
  return out;
}

ImageBuffer OpEqualize(const ImageBuffer& img, double) {
  ImageBuffer out = img;
  const size_t npx = static_cast<size_t>(img.width) * img.height;
  for (int c = 0; c < img.channels; ++c) {
    std::array<uint32_t, 256> hist{};
    for (size_t i = 0; i < npx; ++i) {
      const int byte = static_cast<int>(std::lround(
          std::clamp(img.pixels[i * img.channels + c], 0.0f, 1.0f) * 255.0f));
      ++hist[static_cast<size_t>(byte)];
    }
    std::array<float, 256> lut{};
    uint32_t cum = 0;
    uint32_t nonzero_min = 0;
    for (const uint32_t h : hist) {
      if (h > 0) {
        nonzero_min = h;
        break;
      }
    }
    const double denom = static_cast<double>(npx) - nonzero_min;
    if (denom <= 0.0) continue;  // constant channel
    for (int b = 0; b < 256; ++b) {
      cum += hist[static_cast<size_t>(b)];
      const double mapped = (static_cast<double>(cum) - nonzero_min) / denom;
      lut[static_cast<size_t>(b)] =
          static_cast<float>(std::clamp(mapped, 0.0, 1.0));
    }
    for (size_t i = 0; i < npx; ++i) {
      const int byte = static_cast<int>(std::lround(
          std::clamp(img.pixels[i * img.channels + c], 0.0f, 1.0f) * 255.0f));
      out.pixels[i * img.channels + c] = lut[static_cast<size_t>(byte)];
    }
  }
  return out;
}

constexpr int kNumAugmixOps = 9;

ImageBuffer ApplyAugmixOp(int op, const ImageBuffer& img, double level,
                          Rng& rng) {
  switch (op) {
    case 0: return OpRotate(img, level, rng);
    case 1: return OpShear(img, level, /*horizontal=*/true, rng);
    case 2: return OpShear(img, level, /*horizontal=*/false, rng);
    case 3: return OpTranslate(img, level, /*horizontal=*/true, rng);
    case 4: return OpTranslate(img, level, /*horizontal=*/false, rng);
    case 5: return OpPosterize(img, level);
    case 6: return OpSolarize(img, level);
    case 7: return OpAutocontrast(img, level);
    default: return OpEqualize(img, level);
  }
}

}  // namespace

void SoftLabel::Validate() const {
  double sum = 0.0;
  for (const double w : weights) {
    if (w < 0.0) throw ValidationError("soft label weight below zero");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("soft label weights must sum to 1");
  }
}

SoftLabel SoftLabel::OneHot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw ValidationError("label out of range for one-hot");
  }
  SoftLabel sl;
  sl.weights.assign(static_cast<size_t>(num_classes), 0.0);
  sl.weights[static_cast<size_t>(label)] = 1.0;
  return sl;
}

SoftLabel SoftLabel::Mix(int label_a, int label_b, double lambda,
                         int num_classes) {
  SoftLabel sl;
  sl.weights.assign(static_cast<size_t>(num_classes), 0.0);
  sl.weights[static_cast<size_t>(label_a)] += lambda;
  sl.weights[static_cast<size_t>(label_b)] += 1.0 - lambda;
  return sl;
}

MixResult Mixup(const ImageBuffer& a, int label_a, const ImageBuffer& b,
                int label_b, int num_classes, double alpha, uint64_t seed,
                const MixOverrides& overrides) {
  CheckGeometry(a, b);
  if (!(alpha > 0.0)) throw ValidationError("mixup alpha must be positive");
  Rng rng(Hash64().U64(seed).Str("mixup").Digest());
  const double lambda =
      overrides.lambda.has_value() ? *overrides.lambda : rng.Beta(alpha, alpha);
  MixResult result;
  result.branch = MixBranch::kMixup;
  result.lambda = lambda;
  result.lambda_adjusted = lambda;
  result.image = LerpImages(a, b, lambda);
  result.label = SoftLabel::Mix(label_a, label_b, lambda, num_classes);
  return result;
}

MixResult Cutmix(const ImageBuffer& a, int label_a, const ImageBuffer& b,
                 int label_b, int num_classes, double alpha, uint64_t seed,
                 const MixOverrides& overrides) {
  CheckGeometry(a, b);
  if (!(alpha > 0.0)) throw ValidationError("cutmix alpha must be positive");
  Rng rng(Hash64().U64(seed).Str("cutmix").Digest());
  const double lambda =
      overrides.lambda.has_value() ? *overrides.lambda : rng.Beta(alpha, alpha);
  const Box box = overrides.box.has_value()
                      ? *overrides.box
                      : SampleCutmixBox(a.width, a.height, lambda, rng);
  if (box.x1 < 0 || box.y1 < 0 || box.x2 > a.width || box.y2 > a.height ||
      box.x1 > box.x2 || box.y1 > box.y2) {
    throw ValidationError("cutmix box exceeds the image");
  }
  MixResult result;
  result.branch = MixBranch::kCutmix;
  result.lambda = lambda;
  result.box = box;
  result.image = a;
  for (int y = box.y1; y < box.y2; ++y) {
    for (int x = box.x1; x < box.x2; ++x) {
      for (int c = 0; c < a.channels; ++c) {
        result.image.At(y, x, c) = b.At(y, x, c);
      }
    }
  }
  const double area = static_cast<double>(a.width) * a.height;
  result.lambda_adjusted = 1.0 - box.Area() / area;
  result.label =
      SoftLabel::Mix(label_a, label_b, result.lambda_adjusted, num_classes);
  return result;
}

MixResult CutmixMixupSwitch(const ImageBuffer& a, int label_a,
                            const ImageBuffer& b, int label_b, int num_classes,
                            double p_switch, double alpha_cutmix,
                            double alpha_mixup, uint64_t seed,
                            const MixOverrides& overrides) {
  if (p_switch < 0.0 || p_switch > 1.0) {
    throw ValidationError("switch probability must lie in [0,1]");
  }
  Rng rng(Hash64().U64(seed).Str("switch").Digest());
  const bool use_cutmix = overrides.use_cutmix.has_value()
                              ? *overrides.use_cutmix
                              : rng.Bernoulli(p_switch);
  return use_cutmix
             ? Cutmix(a, label_a, b, label_b, num_classes, alpha_cutmix, seed,
                      overrides)
             : Mixup(a, label_a, b, label_b, num_classes, alpha_mixup, seed,
                     overrides);
}

void AugmixConfig::Validate() const {
  if (severity < 1) throw ValidationError("augmix severity must be >= 1");
  if (width < 1) throw ValidationError("augmix width must be >= 1");
  if (depth < 0) throw ValidationError("augmix depth must be >= 0");
  if (!(dirichlet_alpha > 0.0)) {
    throw ValidationError("augmix dirichlet alpha must be positive");
  }
  if (!(beta_alpha > 0.0)) {
    throw ValidationError("augmix beta alpha must be positive");
  }
}

const std::vector<std::string_view>& AugmixOpNames() {
  static const std::vector<std::string_view> names = {
      "rotate",      "shear_x",   "shear_y",  "translate_x", "translate_y",
      "posterize",   "solarize",  "autocontrast", "equalize"};
  return names;
}

ImageBuffer Augmix(const ImageBuffer& image, const AugmixConfig& cfg,
                   uint64_t seed, const AugmixOverrides& overrides) {
  cfg.Validate();
  Rng rng(Hash64().U64(seed).Str("augmix").Digest());
  const auto chain_weights = rng.Dirichlet(cfg.dirichlet_alpha, cfg.width);
  const double m = overrides.blend_m.has_value()
                       ? *overrides.blend_m
                       : rng.Beta(cfg.beta_alpha, cfg.beta_alpha);
  if (m >= 1.0) return image;  // blend endpoint: mix contributes nothing

  std::vector<double> mix(image.pixels.size(), 0.0);
  for (int chain = 0; chain < cfg.width; ++chain) {
    const int depth =
        cfg.depth > 0 ? cfg.depth : static_cast<int>(rng.UniformInt(1, 3));
    ImageBuffer cur = image;
    for (int d = 0; d < depth; ++d) {
      const int op = static_cast<int>(rng.UniformInt(0, kNumAugmixOps - 1));
      // Magnitude scales linearly with severity; severity 10 spans the full
      // range of each op.
      const double level =
          rng.Uniform(0.1, static_cast<double>(cfg.severity)) / 10.0;
      cur = ApplyAugmixOp(op, cur, std::min(level, 1.0), rng);
    }
    for (size_t i = 0; i < mix.size(); ++i) {
      mix[i] += chain_weights[static_cast<size_t>(chain)] * cur.pixels[i];
    }
  }
  ImageBuffer out = image;
  for (size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = static_cast<float>(m * image.pixels[i] + (1.0 - m) * mix[i]);
  }
  out.ClampInPlace();
  return out;
}

}  // namespace robkit
