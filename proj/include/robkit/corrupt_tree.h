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

#ifndef ROBKIT_CORRUPT_TREE_H_
#define ROBKIT_CORRUPT_TREE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "robkit/corruptions.h"
#include "robkit/manifest.h"

namespace robkit {

struct CorruptedTreeDescriptor {
  std::filesystem::path root;
  CorruptionProfile profile = CorruptionProfile::kNatural;
  uint64_t seed = 0;
  std::vector<std::string> kinds;
  std::vector<int> severities;  // always 1..5 for built trees
  size_t item_count = 0;
  // (kind, severity) -> manifest path under root/manifests.
  std::map<std::pair<std::string, int>, std::filesystem::path> cell_manifests;
};

// Materializes out/<kind>/<severity>/<item-id>.png for every item at every
// (kind, severity) of the profile. Per-item seeds are
// hash64(seed, item id, kind, severity), so the tree is identical for any
// processing order or thread count. The tree is built in a temp directory
// and renamed into place.
CorruptedTreeDescriptor BuildCorruptedTestset(
    const DatasetManifest& manifest,
    const std::filesystem::path& resolved_root, CorruptionProfile profile,
    uint64_t seed, const std::filesystem::path& out, int threads = 0,
    const CorruptionContext& ctx = {});

CorruptedTreeDescriptor LoadCorruptedTree(const std::filesystem::path& root);

}  // namespace robkit

#endif  // ROBKIT_CORRUPT_TREE_H_
