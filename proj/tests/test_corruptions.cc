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

#include "robkit/corruptions.h"
#include "robkit/error.h"
#include "robkit/severity_params.h"
#include "test_util.h"

using namespace robkit;
using robkit::testing::BitEqual;
using robkit::testing::ImageMean;
using robkit::testing::MeanAbsDiff;
using robkit::testing::SyntheticImage;

TEST_CASE("exactly 15 kinds, weather is {snow, frost, fog}") {
  CHECK(AllCorruptionKinds().size() == 15);
  std::set<std::string> weather;
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    if (IsWeather(kind)) weather.insert(std::string(KindName(kind)));
  }
  CHECK(weather == std::set<std::string>{"snow", "frost", "fog"});
  CHECK(KindsForProfile(CorruptionProfile::kNatural).size() == 15);
  CHECK(KindsForProfile(CorruptionProfile::kMedical).size() == 12);
  for (const CorruptionKind kind : KindsForProfile(CorruptionProfile::kMedical)) {
    CHECK_FALSE(IsWeather(kind));
  }
}

TEST_CASE("kind name round trip and category totals") {
  int noise = 0, blur = 0, weather = 0, digital = 0;
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    CHECK(KindFromName(KindName(kind)) == kind);
    switch (KindCategory(kind)) {
      case CorruptionCategory::kNoise: ++noise; break;
      case CorruptionCategory::kBlur: ++blur; break;
      case CorruptionCategory::kWeather: ++weather; break;
      case CorruptionCategory::kDigital: ++digital; break;
    }
  }
  CHECK(noise == 3);
  CHECK(blur == 4);
  CHECK(weather == 3);
  CHECK(digital == 5);
  CHECK_THROWS_AS(KindFromName("sharpen"), ValidationError);
}

TEST_CASE("same spec twice is byte-identical for every kind") {
  const ImageBuffer img = SyntheticImage(32, 32, 3, 1);
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    CorruptionSpec spec{kind, 3, 1234567};
    const ImageBuffer a = ApplyCorruption(img, spec);
    const ImageBuffer b = ApplyCorruption(img, spec);
    INFO("kind ", KindName(kind));
    CHECK(BitEqual(a, b));
  }
}

TEST_CASE("severity outside [1,5] is rejected") {
  const ImageBuffer img = SyntheticImage(32, 32, 3, 2);
  CHECK_THROWS_AS(
      ApplyCorruption(img, {CorruptionKind::kGaussianNoise, 0, 1}),
      ValidationError);
  CHECK_THROWS_AS(
      ApplyCorruption(img, {CorruptionKind::kGaussianNoise, 6, 1}),
      ValidationError);
}

TEST_CASE("all kinds and severities clamp and preserve geometry") {
  // Non-square on purpose; ranges over both parameter profiles.
  for (const auto [w, h] : {std::pair{32, 24}, std::pair{64, 48}}) {
    const ImageBuffer img = SyntheticImage(w, h, 3, 3, /*margin=*/0.0f);
    for (const CorruptionKind kind : AllCorruptionKinds()) {
      for (int sev = 1; sev <= 5; ++sev) {
        const ImageBuffer out =
            ApplyCorruption(img, {kind, sev, 42});
        INFO("kind ", KindName(kind), " sev ", sev, " size ", w, "x", h);
        REQUIRE(out.width == w);
        REQUIRE(out.height == h);
        REQUIRE(out.channels == 3);
        CHECK(out.IsValid());
      }
    }
  }
}

TEST_CASE("stochastic kinds react to the seed, deterministic kinds do not") {
  const ImageBuffer img = SyntheticImage(64, 64, 3, 4);
  int stochastic_count = 0;
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    const ImageBuffer a = ApplyCorruption(img, {kind, 3, 1});
    const ImageBuffer b = ApplyCorruption(img, {kind, 3, 2});
    INFO("kind ", KindName(kind));
    if (IsStochastic(kind)) {
      ++stochastic_count;
      CHECK_FALSE(BitEqual(a, b));
    } else {
      CHECK(BitEqual(a, b));
    }
  }
  CHECK(stochastic_count == 8);
}

TEST_CASE("gaussian noise statistical oracle on constant gray") {
  // Mean over >=4096 pixels of clamp(0.5 + sigma_1 * g) stays within
  // 0.5 +/- 0.01; sigma_1 read from the shipped table.
  const double sigma =
      SeverityTable::Builtin().Level("r64", "gaussian_noise", 1).Get("sigma");
  CHECK(sigma > 0.0);
  ImageBuffer gray(64, 64, 3, 0.5f);
  const ImageBuffer out =
      ApplyCorruption(gray, {CorruptionKind::kGaussianNoise, 1, 99});
  CHECK(ImageMean(out) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(MeanAbsDiff(out, gray) > 0.5 * sigma);  // noise actually landed
}

TEST_CASE("brightness severities give a non-decreasing image mean") {
  const ImageBuffer img = SyntheticImage(64, 64, 3, 5, /*margin=*/0.15f);
  double prev = ImageMean(img);
  for (int sev = 1; sev <= 5; ++sev) {
    const ImageBuffer out =
        ApplyCorruption(img, {CorruptionKind::kBrightness, sev, 0});
    const double mean = ImageMean(out);
    CHECK(mean > prev);
    prev = mean;
  }
}

TEST_CASE("severity proxy is non-decreasing on a small fixture") {
  // Smaller version of the acceptance criterion for fast feedback: mean
  // absolute deviation from clean, averaged over 8 images, across 1..5.
  const int kImages = 8;
  std::vector<ImageBuffer> fixtures;
  for (int i = 0; i < kImages; ++i) {
    fixtures.push_back(SyntheticImage(32, 32, 3, 700 + i));
  }
  for (const CorruptionKind kind : AllCorruptionKinds()) {
    double prev = -1.0;
    for (int sev = 1; sev <= 5; ++sev) {
      double mad = 0.0;
      for (int i = 0; i < kImages; ++i) {
        const ImageBuffer out = ApplyCorruption(
            fixtures[static_cast<size_t>(i)],
            {kind, sev, ItemSeed(5, std::to_string(i), KindName(kind), sev)});
        mad += MeanAbsDiff(out, fixtures[static_cast<size_t>(i)]);
      }
      mad /= kImages;
      INFO("kind ", KindName(kind), " sev ", sev, " mad ", mad, " prev ",
           prev);
      CHECK(mad >= prev);
      prev = mad;
    }
  }
}

TEST_CASE("single-channel images work for all medical kinds") {
  const ImageBuffer img = SyntheticImage(28, 28, 1, 6);
  for (const CorruptionKind kind : KindsForProfile(CorruptionProfile::kMedical)) {
    const ImageBuffer out = ApplyCorruption(img, {kind, 4, 11});
    INFO("kind ", KindName(kind));
    REQUIRE(out.channels == 1);
    CHECK(out.IsValid());
  }
}

TEST_CASE("weather kinds on single-channel input use the rgb fallback") {
  const ImageBuffer img = SyntheticImage(32, 32, 1, 7);
  for (const CorruptionKind kind :
       {CorruptionKind::kSnow, CorruptionKind::kFrost, CorruptionKind::kFog}) {
    const ImageBuffer out = ApplyCorruption(img, {kind, 3, 21});
    INFO("kind ", KindName(kind));
    REQUIRE(out.channels == 1);
    CHECK(out.IsValid());
    CHECK(MeanAbsDiff(out, img) > 0.0);
  }
}

TEST_CASE("severity table validation catches a broken primary") {
  const std::string bad = R"({
    "version": "x",
    "profiles": {"r32": {"gaussian_noise": {
      "primary": "sigma", "increasing": true,
      "levels": [{"sigma": 0.5}, {"sigma": 0.4}, {"sigma": 0.3},
                 {"sigma": 0.2}, {"sigma": 0.1}]}}}
  })";
  CHECK_THROWS_AS(SeverityTable::FromJson(bad), ValidationError);
}

TEST_CASE("profile selection by geometry") {
  CHECK(SeverityTable::ProfileForGeometry(28, 28) == "r28");
  CHECK(SeverityTable::ProfileForGeometry(32, 32) == "r32");
  CHECK(SeverityTable::ProfileForGeometry(64, 64) == "r64");
  CHECK(SeverityTable::ProfileForGeometry(96, 96) == "r64");
  CHECK(SeverityTable::ProfileForGeometry(28, 32) == "r32");
}

TEST_CASE("builtin table is valid and versioned") {
  const SeverityTable& table = SeverityTable::Builtin();
  CHECK_NOTHROW(table.Validate());
  CHECK_FALSE(table.version().empty());
}
