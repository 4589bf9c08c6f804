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

#ifndef ROBKIT_BUILDERS_H_
#define ROBKIT_BUILDERS_H_

#include <filesystem>
#include <string>
#include <vector>

#include "robkit/manifest.h"
#include "robkit/predictions.h"

namespace robkit {

struct ClassIntersection {
  std::vector<ClassDescriptor> source_space;
  std::vector<ClassDescriptor> target_space;
  // (source key -> target index) for the key-set intersection, ordered by
  // target index.
  std::vector<std::pair<std::string, int>> mapping;

  size_t size() const { return mapping.size(); }
};

// Matching is by stable key only; indices and display names never
// participate. An empty intersection is a valid (warned) result.
ClassIntersection IntersectClasses(
    const std::vector<ClassDescriptor>& source_space,
    const std::vector<ClassDescriptor>& target_space);

// Builds a manifest over a `<root>/<class_key>/<files>` tree: label space
// from sorted subdirectory names, one item per image file.
DatasetManifest ManifestFromClassTree(const std::filesystem::path& root,
                                      const std::string& name);

// Keeps every source item of an intersected class, relabels to target
// indices, resamples to target geometry (bilinear, half-pixel centers,
// antialias pre-blur past 2x downscale), and writes images + manifest under
// `out`. The output label space is the full target space.
DatasetManifest BuildIntersectionTestset(
    const DatasetManifest& source,
    const std::filesystem::path& source_resolved_root,
    const ClassIntersection& intersection, Geometry target_geometry,
    const std::filesystem::path& out, int threads = 0);

// Keeps exactly the items where predicted != true label; images are copied
// unmodified. preds must cover the validation manifest exactly once.
DatasetManifest BuildAdversarialFilterTestset(
    const DatasetManifest& val, const std::filesystem::path& val_resolved_root,
    const PredictionSet& preds, const std::filesystem::path& out);

// Item indices with predicted != label (the -A filter rule, no IO).
std::vector<size_t> MisclassifiedIndices(const DatasetManifest& val,
                                         const PredictionSet& preds);

}  // namespace robkit

#endif  // ROBKIT_BUILDERS_H_
