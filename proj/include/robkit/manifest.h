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

#ifndef ROBKIT_MANIFEST_H_
#define ROBKIT_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

namespace robkit {

struct ClassDescriptor {
  int index = 0;
  std::string key;           // stable external id, e.g. a WNID
  std::string display_name;

  bool operator==(const ClassDescriptor&) const = default;
};

enum class Source { kReal, kGenerated };

std::string SourceName(Source s);
Source SourceFromName(const std::string& name);

struct ItemRecord {
  std::string id;
  std::string path;  // relative to the manifest root
  int label = 0;
  Source source = Source::kReal;
  std::string provenance;  // optional free-form (generator name, seed, ...)
};

struct Geometry {
  int width = 0;
  int height = 0;
  int channels = 3;

  bool operator==(const Geometry&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::string root;  // interpreted relative to the manifest file's directory
  std::vector<ClassDescriptor> label_space;
  std::vector<ItemRecord> items;
  Geometry geometry;

  size_t size() const { return items.size(); }
  size_t CountBySource(Source s) const;
  std::vector<size_t> PerClassCounts() const;

  // Structural invariants: dense unique label indices, unique keys, unique
  // item ids, labels within range. Throws ValidationError.
  void Validate() const;
};

// Label spaces are equal when keys agree in order (display names are free).
bool SameLabelSpace(const std::vector<ClassDescriptor>& a,
                    const std::vector<ClassDescriptor>& b);

enum class ImageCheck { kNone, kDecode };

DatasetManifest ParseManifestJson(const std::string& text);
std::string ManifestToJson(const DatasetManifest& m);

// Loads and validates. With ImageCheck::kDecode every item image must
// resolve, decode, and match the declared geometry.
DatasetManifest LoadManifest(const std::filesystem::path& path,
                             ImageCheck check = ImageCheck::kNone);
void SaveManifest(const DatasetManifest& m, const std::filesystem::path& path);

// Absolute directory the manifest's relative item paths resolve against.
std::filesystem::path ResolveRoot(const DatasetManifest& m,
                                  const std::filesystem::path& manifest_path);
std::filesystem::path ItemImagePath(const DatasetManifest& m,
                                    const std::filesystem::path& resolved_root,
                                    const ItemRecord& item);

}  // namespace robkit

#endif  // ROBKIT_MANIFEST_H_
