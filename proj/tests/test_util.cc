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

#include "test_util.h"

#include <cmath>

#include "robkit/rng.h"

namespace robkit::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<uint64_t> counter{0};
  path_ = fs::temp_directory_path() /
          ("robkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ImageBuffer SyntheticImage(int width, int height, int channels, uint64_t seed,
                           float margin) {
  Rng rng(Hash64().U64(seed).Str("synthetic").Digest());
  const double fx = rng.Uniform(1.0, 3.0);
  const double fy = rng.Uniform(1.0, 3.0);
  const double phase = rng.Uniform(0.0, 6.28);
  ImageBuffer img(width, height, channels);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const double wave =
            0.5 + 0.35 * std::sin(fx * 6.28318 * x / width + phase + c) *
                      std::cos(fy * 6.28318 * y / height);
        const double noise = 0.08 * (rng.Uniform() - 0.5);
        const double lo = margin, hi = 1.0 - margin;
        img.At(y, x, c) = static_cast<float>(
            std::min(hi, std::max(lo, wave + noise)));
      }
    }
  }
  return img;
}

fs::path WriteImageFixture(const fs::path& dir, const std::string& name,
                           int count, int width, int height, int channels,
                           int num_classes, uint64_t seed) {
  fs::create_directories(dir / "images");
  DatasetManifest m;
  m.name = name;
  m.root = "images";
  m.label_space = MakeLabelSpace(num_classes);
  m.geometry = Geometry{width, height, channels};
  for (int i = 0; i < count; ++i) {
    const std::string id = name + "_" + std::to_string(i);
    const ImageBuffer img = SyntheticImage(
        width, height, channels, Hash64().U64(seed).I64(i).Digest());
    SavePng(img, dir / "images" / (id + ".png"));
    ItemRecord item;
    item.id = id;
    item.path = id + ".png";
    item.label = i % num_classes;
    item.source = Source::kReal;
    m.items.push_back(std::move(item));
  }
  const fs::path manifest_path = dir / (name + ".manifest.json");
  SaveManifest(m, manifest_path);
  return manifest_path;
}

std::vector<ClassDescriptor> MakeLabelSpace(int num_classes,
                                            const std::string& prefix) {
  std::vector<ClassDescriptor> space;
  for (int i = 0; i < num_classes; ++i) {
    ClassDescriptor cls;
    cls.index = i;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04d", prefix.c_str(), i);
    cls.key = buf;
    cls.display_name = cls.key;
    space.push_back(std::move(cls));
  }
  return space;
}

double MeanAbsDiff(const ImageBuffer& a, const ImageBuffer& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    acc += std::fabs(static_cast<double>(a.pixels[i]) - b.pixels[i]);
  }
  return acc / static_cast<double>(a.pixels.size());
}

double ImageMean(const ImageBuffer& img) {
  double acc = 0.0;
  for (const float v : img.pixels) acc += v;
  return acc / static_cast<double>(img.pixels.size());
}

bool BitEqual(const ImageBuffer& a, const ImageBuffer& b) {
  return a.SameGeometry(b) && a.pixels == b.pixels;
}

}  // namespace robkit::testing
