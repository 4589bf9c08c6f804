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

#include <set>

#include <doctest.h>

#include "robkit/augment.h"
#include "robkit/corruptions.h"
#include "robkit/error.h"
#include "test_util.h"

using namespace robkit;
using robkit::testing::BitEqual;
using robkit::testing::SyntheticImage;

TEST_CASE("mixup with forced lambda=1 returns `a` bit-exactly") {
  const ImageBuffer a = SyntheticImage(16, 16, 3, 1);
  const ImageBuffer b = SyntheticImage(16, 16, 3, 2);
  MixOverrides ov;
  ov.lambda = 1.0;
  const MixResult r = Mixup(a, 0, b, 1, 4, 0.8, 5, ov);
  CHECK(BitEqual(r.image, a));
  CHECK(r.label.weights == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("mixup linearity on constant images at lambda 0.5") {
  ImageBuffer a(8, 8, 3, 0.2f);
  ImageBuffer b(8, 8, 3, 0.6f);
  MixOverrides ov;
  ov.lambda = 0.5;
  const MixResult r = Mixup(a, 0, b, 1, 2, 0.8, 5, ov);
  for (const float v : r.image.pixels) {
    CHECK(v == doctest::Approx(0.4f).epsilon(1e-6));
  }
  CHECK(r.label.weights[0] == doctest::Approx(0.5));
  CHECK(r.label.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("mixup is deterministic under a fixed seed") {
  const ImageBuffer a = SyntheticImage(12, 12, 3, 3);
  const ImageBuffer b = SyntheticImage(12, 12, 3, 4);
  const MixResult r1 = Mixup(a, 0, b, 1, 2, 0.8, 42);
  const MixResult r2 = Mixup(a, 0, b, 1, 2, 0.8, 42);
  CHECK(r1.lambda == r2.lambda);
  CHECK(BitEqual(r1.image, r2.image));
  CHECK(r1.label.weights == r2.label.weights);
  const MixResult r3 = Mixup(a, 0, b, 1, 2, 0.8, 43);
  CHECK(r1.lambda != r3.lambda);
}

TEST_CASE("mixup of an image with itself is the identity for any lambda") {
  const ImageBuffer a = SyntheticImage(10, 10, 3, 5);
  for (const double lambda : {0.0, 0.3, 0.777, 1.0}) {
    MixOverrides ov;
    ov.lambda = lambda;
    const MixResult r = Mixup(a, 0, a, 0, 2, 0.8, 1, ov);
    CHECK(BitEqual(r.image, a));
  }
}

TEST_CASE("soft labels are distributions supported on the two inputs") {
  const ImageBuffer a = SyntheticImage(8, 8, 3, 6);
  const ImageBuffer b = SyntheticImage(8, 8, 3, 7);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const MixResult r = Mixup(a, 2, b, 5, 10, 0.8, seed);
    CHECK_NOTHROW(r.label.Validate());
    for (size_t c = 0; c < r.label.weights.size(); ++c) {
      if (c != 2 && c != 5) CHECK(r.label.weights[c] == 0.0);
    }
  }
}

TEST_CASE("cutmix full box returns `b`, zero box returns `a`") {
  const ImageBuffer a = SyntheticImage(16, 16, 3, 8);
  const ImageBuffer b = SyntheticImage(16, 16, 3, 9);
  MixOverrides full;
  full.lambda = 0.0;
  full.box = Box{0, 0, 16, 16};
  const MixResult rb = Cutmix(a, 0, b, 1, 2, 1.0, 3, full);
  CHECK(BitEqual(rb.image, b));
  CHECK(rb.lambda_adjusted == 0.0);
  CHECK(rb.label.weights == std::vector<double>{0.0, 1.0});

  MixOverrides zero;
  zero.lambda = 1.0;
  zero.box = Box{5, 5, 5, 5};
  const MixResult ra = Cutmix(a, 0, b, 1, 2, 1.0, 3, zero);
  CHECK(BitEqual(ra.image, a));
  CHECK(ra.label.weights == std::vector<double>{1.0, 0.0});
}

TEST_CASE("cutmix 32x32 box on a 64x64 image gives lambda' = 0.75") {
  const ImageBuffer a = SyntheticImage(64, 64, 3, 10);
  const ImageBuffer b = SyntheticImage(64, 64, 3, 11);
  MixOverrides ov;
  ov.lambda = 0.5;
  ov.box = Box{8, 16, 40, 48};
  const MixResult r = Cutmix(a, 0, b, 1, 2, 1.0, 3, ov);
  CHECK(r.lambda_adjusted == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.label.weights[0] == doctest::Approx(0.75));
  CHECK(r.label.weights[1] == doctest::Approx(0.25));
  // Replaced pixels are exactly the box area when a and b differ everywhere.
  ImageBuffer ones(64, 64, 3, 1.0f);
  ImageBuffer zeros(64, 64, 3, 0.0f);
  const MixResult rc = Cutmix(ones, 0, zeros, 1, 2, 1.0, 3, ov);
  size_t diff = 0;
  for (size_t i = 0; i < rc.image.pixels.size(); i += 3) {
    if (rc.image.pixels[i] != 1.0f) ++diff;
  }
  CHECK(diff == static_cast<size_t>(ov.box->Area()));
}

TEST_CASE("cutmix pixel accounting across random draws") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    ImageBuffer a(32, 24, 1, 0.75f);
    ImageBuffer b(32, 24, 1, 0.25f);
    const MixResult r = Cutmix(a, 0, b, 1, 2, 1.0, seed);
    size_t diff = 0;
    for (const float v : r.image.pixels) {
      if (v != 0.75f) ++diff;
    }
    REQUIRE(r.box.has_value());
    CHECK(diff == static_cast<size_t>(r.box->Area()));
    const double expect_lambda =
        1.0 - static_cast<double>(r.box->Area()) / (32.0 * 24.0);
    CHECK(r.lambda_adjusted == doctest::Approx(expect_lambda).epsilon(1e-12));
  }
}

TEST_CASE("switch honors degenerate probabilities") {
  const ImageBuffer a = SyntheticImage(8, 8, 3, 12);
  const ImageBuffer b = SyntheticImage(8, 8, 3, 13);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(CutmixMixupSwitch(a, 0, b, 1, 2, 0.0, 1.0, 0.8, seed).branch ==
          MixBranch::kMixup);
    CHECK(CutmixMixupSwitch(a, 0, b, 1, 2, 1.0, 1.0, 0.8, seed).branch ==
          MixBranch::kCutmix);
  }
}

TEST_CASE("switch empirical rate near one half") {
  const ImageBuffer a = SyntheticImage(4, 4, 1, 14);
  const ImageBuffer b = SyntheticImage(4, 4, 1, 15);
  int cutmix_count = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const MixResult r = CutmixMixupSwitch(a, 0, b, 1, 2, 0.5, 1.0, 0.8,
                                          static_cast<uint64_t>(i));
    if (r.branch == MixBranch::kCutmix) ++cutmix_count;
  }
  const double rate = static_cast<double>(cutmix_count) / n;
  CHECK(rate == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("geometry mismatch is rejected") {
  const ImageBuffer a = SyntheticImage(8, 8, 3, 16);
  const ImageBuffer b = SyntheticImage(9, 8, 3, 17);
  CHECK_THROWS_AS(Mixup(a, 0, b, 1, 2, 0.8, 1), ValidationError);
  CHECK_THROWS_AS(Cutmix(a, 0, b, 1, 2, 1.0, 1), ValidationError);
}

TEST_CASE("augmix with forced m=1 returns the input bit-exactly") {
  const ImageBuffer img = SyntheticImage(24, 24, 3, 18);
  AugmixConfig cfg;
  cfg.severity = 10;
  AugmixOverrides ov;
  ov.blend_m = 1.0;
  CHECK(BitEqual(Augmix(img, cfg, 7, ov), img));
}

TEST_CASE("augmix is deterministic and in range") {
  const ImageBuffer img = SyntheticImage(24, 24, 3, 19);
  AugmixConfig cfg;
  cfg.severity = 10;
  const ImageBuffer a = Augmix(img, cfg, 7);
  const ImageBuffer b = Augmix(img, cfg, 7);
  CHECK(BitEqual(a, b));
  CHECK(a.IsValid());
  const ImageBuffer c = Augmix(img, cfg, 8);
  CHECK_FALSE(BitEqual(a, c));
}

TEST_CASE("augmix fixed depth and single-channel input work") {
  const ImageBuffer img = SyntheticImage(28, 28, 1, 20);
  AugmixConfig cfg;
  cfg.severity = 5;
  cfg.width = 2;
  cfg.depth = 2;
  const ImageBuffer out = Augmix(img, cfg, 9);
  CHECK(out.IsValid());
  CHECK(out.channels == 1);
}

TEST_CASE("augmix config validation") {
  AugmixConfig cfg;
  cfg.severity = 0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = AugmixConfig{};
  cfg.width = 0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = AugmixConfig{};
  cfg.dirichlet_alpha = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
}

TEST_CASE("augmix primitive set is disjoint from the corruption kinds") {
  std::set<std::string> corruption_names;
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    corruption_names.insert(std::string(KindName(kind)));
  }
  for (const std::string_view op : AugmixOpNames()) {
    CHECK(corruption_names.count(std::string(op)) == 0);
  }
  CHECK(AugmixOpNames().size() == 9);
}
