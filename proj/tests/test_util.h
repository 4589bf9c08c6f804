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

#ifndef ROBKIT_TESTS_TEST_UTIL_H_
#define ROBKIT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "robkit/image.h"
#include "robkit/manifest.h"

namespace robkit::testing {

// Fresh directory under the system temp root; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Smooth, mid-range synthetic image: low-frequency waves plus seeded noise,
// values kept inside [margin, 1-margin] so brightness shifts stay visible.
ImageBuffer SyntheticImage(int width, int height, int channels, uint64_t seed,
                           float margin = 0.1f);

// Writes `count` synthetic images and a matching manifest (single class
// space of `num_classes`, labels round-robin). Returns the manifest path.
std::filesystem::path WriteImageFixture(const std::filesystem::path& dir,
                                        const std::string& name, int count,
                                        int width, int height, int channels,
                                        int num_classes, uint64_t seed);

std::vector<ClassDescriptor> MakeLabelSpace(int num_classes,
                                            const std::string& prefix = "cls");

double MeanAbsDiff(const ImageBuffer& a, const ImageBuffer& b);
double ImageMean(const ImageBuffer& img);
bool BitEqual(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace robkit::testing

#endif  // ROBKIT_TESTS_TEST_UTIL_H_
