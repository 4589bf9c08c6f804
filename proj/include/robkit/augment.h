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

#ifndef ROBKIT_AUGMENT_H_
#define ROBKIT_AUGMENT_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "robkit/image.h"

namespace robkit {

// Per-class mixing weights; non-negative, summing to 1.
struct SoftLabel {
  std::vector<double> weights;

  void Validate() const;
  static SoftLabel OneHot(int label, int num_classes);
  static SoftLabel Mix(int label_a, int label_b, double lambda,
                       int num_classes);
};

struct Box {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // half-open [x1,x2) x [y1,y2)
  int Area() const { return (x2 - x1) * (y2 - y1); }
};

enum class MixBranch { kMixup, kCutmix };

struct MixResult {
  ImageBuffer image;
  SoftLabel label;
  double lambda = 0.0;           // drawn Beta sample
  double lambda_adjusted = 0.0;  // after box clipping (cutmix only)
  MixBranch branch = MixBranch::kMixup;
  std::optional<Box> box;        // cutmix only
};

// Test hooks: endpoint examples need bit-exact control over the drawn
// values. Production paths leave these empty and draw from the seeded
// generator.
struct MixOverrides {
  std::optional<double> lambda;
  std::optional<Box> box;           // cutmix box
  std::optional<bool> use_cutmix;   // switch branch
};

MixResult Mixup(const ImageBuffer& a, int label_a, const ImageBuffer& b,
                int label_b, int num_classes, double alpha, uint64_t seed,
                const MixOverrides& overrides = {});

MixResult Cutmix(const ImageBuffer& a, int label_a, const ImageBuffer& b,
                 int label_b, int num_classes, double alpha, uint64_t seed,
                 const MixOverrides& overrides = {});

MixResult CutmixMixupSwitch(const ImageBuffer& a, int label_a,
                            const ImageBuffer& b, int label_b, int num_classes,
                            double p_switch, double alpha_cutmix,
                            double alpha_mixup, uint64_t seed,
                            const MixOverrides& overrides = {});

struct AugmixConfig {
  int severity = 3;        // >= 1; magnitudes scale linearly, 10 = maximum
  int width = 3;           // number of chains >= 1
  int depth = 0;           // fixed chain length, or 0: sampled in [1,3]
  double dirichlet_alpha = 1.0;
  double beta_alpha = 1.0;

  void Validate() const;
};

struct AugmixOverrides {
  std::optional<double> blend_m;  // forces the final Beta blend factor
};

// Chain-of-primitive-ops augmentation. The op set (geometric/color) is
// disjoint from the corruption kinds; out = m*image + (1-m)*mix.
ImageBuffer Augmix(const ImageBuffer& image, const AugmixConfig& cfg,
                   uint64_t seed, const AugmixOverrides& overrides = {});

// Names of the augmentation primitives (for the disjointness check).
const std::vector<std::string_view>& AugmixOpNames();

}  // namespace robkit

#endif  // ROBKIT_AUGMENT_H_
