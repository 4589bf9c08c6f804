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

#ifndef ROBKIT_CORRUPTIONS_H_
#define ROBKIT_CORRUPTIONS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "robkit/image.h"
#include "robkit/severity_params.h"

namespace robkit {

enum class CorruptionKind {
  kGaussianNoise,
  kShotNoise,
  kImpulseNoise,
  kDefocusBlur,
  kGlassBlur,
  kMotionBlur,
  kZoomBlur,
  kSnow,
  kFrost,
  kFog,
  kBrightness,
  kContrast,
  kElasticTransform,
  kPixelate,
  kJpegCompression,
};

enum class CorruptionCategory { kNoise, kBlur, kWeather, kDigital };

inline constexpr int kNumCorruptionKinds = 15;

const std::array<CorruptionKind, kNumCorruptionKinds>& AllCorruptionKinds();
std::string_view KindName(CorruptionKind kind);
CorruptionKind KindFromName(std::string_view name);
CorruptionCategory KindCategory(CorruptionKind kind);
bool IsWeather(CorruptionKind kind);

// Stochastic kinds draw all randomness from CorruptionSpec::seed; the
// deterministic ones ignore it entirely (tested).
bool IsStochastic(CorruptionKind kind);

enum class CorruptionProfile { kNatural, kMedical };

std::string_view ProfileName(CorruptionProfile p);
CorruptionProfile ProfileFromName(std::string_view name);

// natural: all 15 kinds; medical: the 12 non-weather kinds.
std::vector<CorruptionKind> KindsForProfile(CorruptionProfile profile);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kGaussianNoise;
  int severity = 1;  // in [1,5]
  uint64_t seed = 0;
};

struct CorruptionContext {
  const SeverityTable* table = &SeverityTable::Builtin();
  // Optional texture files for frost; the procedural generator is the
  // default when empty.
  std::vector<std::filesystem::path> frost_textures;
};

// Pure function of (image, spec, context): identical geometry out, all
// intensities clamped to [0,1], independent of call order and thread count.
ImageBuffer ApplyCorruption(const ImageBuffer& image,
                            const CorruptionSpec& spec,
                            const CorruptionContext& ctx = {});

}  // namespace robkit

#endif  // ROBKIT_CORRUPTIONS_H_
