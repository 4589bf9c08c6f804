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

#ifndef ROBKIT_DATASET_OPS_H_
#define ROBKIT_DATASET_OPS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "robkit/manifest.h"

namespace robkit {

struct ChannelStats {
  std::vector<double> mean;  // per channel, in [0,1]
  std::vector<double> std;   // population standard deviation
};

// Counts are made platform-independent by rounding half to even.
int64_t RoundHalfEven(double x);

// Population mean/std over every pixel of every item, per channel.
// Per-item partials are combined by a fixed pairwise reduction tree, so the
// result is bit-identical for any thread count.
ChannelStats ComputeChannelStats(const DatasetManifest& m,
                                 const std::filesystem::path& resolved_root,
                                 int threads = 0);

// Per class c with n_c items, keeps exactly RoundHalfEven(fraction * n_c)
// items drawn under the seed. stratify=false switches to a single uniform
// draw of RoundHalfEven(fraction * N) items.
DatasetManifest StratifiedSubset(const DatasetManifest& m, double fraction,
                                 uint64_t seed, bool stratify = true);

struct IngestLabeling {
  enum class Mode { kSubdirs, kMapFile };
  Mode mode = Mode::kSubdirs;
  std::filesystem::path map_file;  // lines: relative/path<TAB>class_key
};

// Builds a generated-source manifest from an image directory. Every label
// key must exist in the target space; an unknown key rejects the whole
// ingest. Geometry is taken from the first image and enforced on the rest.
DatasetManifest IngestGenerated(const std::filesystem::path& image_dir,
                                const IngestLabeling& labeling,
                                const std::vector<ClassDescriptor>& target_space,
                                const std::string& name = "generated");

struct TakeSpec {
  // Exactly one is set; ratio r means RoundHalfEven(r * N_real) items.
  std::optional<int64_t> count;
  std::optional<double> ratio;

  static TakeSpec Count(int64_t n) { return {.count = n, .ratio = {}}; }
  static TakeSpec Ratio(double r) { return {.count = {}, .ratio = r}; }
};

// Needed when the two manifests resolve to different roots: item paths are
// rewritten relative to out_root.
struct MixPathContext {
  std::filesystem::path real_root;
  std::filesystem::path gen_root;
  std::filesystem::path out_root;
};

// D_mix: every real item plus `take` generated items sampled
// class-stratified under the seed. Ids are prefixed by source.
DatasetManifest MixDatasets(const DatasetManifest& real,
                            const DatasetManifest& generated, TakeSpec take,
                            uint64_t seed,
                            const std::optional<MixPathContext>& paths = {});

}  // namespace robkit

#endif  // ROBKIT_DATASET_OPS_H_
