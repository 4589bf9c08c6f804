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

#include "robkit/builders.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "robkit/error.h"
#include "robkit/image.h"
#include "robkit/io_util.h"
#include "robkit/thread_pool.h"

namespace robkit {

namespace fs = std::filesystem;

namespace {

bool IsImageFile(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImageBuffer MatchChannels(ImageBuffer img, int channels) {
  if (img.channels == channels) return img;
  return channels == 1 ? RgbToGray(img) : GrayToRgb(img);
}

}  // namespace

ClassIntersection IntersectClasses(
    const std::vector<ClassDescriptor>& source_space,
    const std::vector<ClassDescriptor>& target_space) {
  ClassIntersection out;
  out.source_space = source_space;
  out.target_space = target_space;
  std::unordered_set<std::string> source_keys;
  for (const auto& cls : source_space) source_keys.insert(cls.key);
  for (const auto& cls : target_space) {
    if (source_keys.count(cls.key)) {
      out.mapping.emplace_back(cls.key, cls.index);
    }
  }
  std::sort(out.mapping.begin(), out.mapping.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

DatasetManifest ManifestFromClassTree(const fs::path& root,
                                      const std::string& name) {
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw IoError("source tree does not exist: " + root.string());
  }
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  DatasetManifest m;
  m.name = name;
  m.root = ".";
  int index = 0;
  for (const auto& dir : class_dirs) {
    ClassDescriptor cls;
    cls.index = index++;
    cls.key = dir.filename().string();
    cls.display_name = cls.key;
    m.label_space.push_back(cls);
  }
  bool geometry_set = false;
  for (size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& f : fs::recursive_directory_iterator(class_dirs[c])) {
      if (f.is_regular_file() && IsImageFile(f.path())) {
        files.push_back(f.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      ItemRecord item;
      item.id = fs::relative(f, root).generic_string();
      item.path = item.id;
      item.label = static_cast<int>(c);
      item.source = Source::kReal;
      if (!geometry_set) {
        const ImageBuffer img = LoadImage(f);
        m.geometry = Geometry{img.width, img.height, img.channels};
        geometry_set = true;
      }
      m.items.push_back(std::move(item));
    }
  }
  m.Validate();
  return m;
}

DatasetManifest BuildIntersectionTestset(const DatasetManifest& source,
                                         const fs::path& source_resolved_root,
                                         const ClassIntersection& intersection,
                                         Geometry target_geometry,
                                         const fs::path& out, int threads) {
  source.Validate();
  std::unordered_map<std::string, int> key_to_target;
  for (const auto& [key, idx] : intersection.mapping) key_to_target[key] = idx;
  std::unordered_map<int, std::string> target_index_to_key;
  for (const auto& cls : intersection.target_space) {
    target_index_to_key[cls.index] = cls.key;
  }

  struct Kept {
    size_t source_index;
    int target_label;
    std::string rel_path;
  };
  std::vector<Kept> kept;
  for (size_t i = 0; i < source.items.size(); ++i) {
    const ItemRecord& item = source.items[i];
    const std::string& key =
        source.label_space[static_cast<size_t>(item.label)].key;
    const auto it = key_to_target.find(key);
    if (it == key_to_target.end()) continue;
    kept.push_back(
        {i, it->second, key + "/" + SanitizeFileName(item.id) + ".png"});
  }

  fs::create_directories(out);
  ParallelFor(kept.size(), threads, [&](size_t k) {
    const Kept& entry = kept[k];
    const ItemRecord& item = source.items[entry.source_index];
    ImageBuffer img =
        LoadImage(ItemImagePath(source, source_resolved_root, item));
    img = MatchChannels(std::move(img), target_geometry.channels);
    img = ResizeBilinear(img, target_geometry.width, target_geometry.height);
    SavePng(img, out / entry.rel_path);
  });

  DatasetManifest result;
  result.name = source.name + "_intersection";
  result.root = ".";
  result.label_space = intersection.target_space;
  result.geometry = target_geometry;
  result.items.reserve(kept.size());
  for (const Kept& entry : kept) {
    ItemRecord rec = source.items[entry.source_index];
    rec.label = entry.target_label;
    rec.path = entry.rel_path;
    result.items.push_back(std::move(rec));
  }
  result.Validate();
  SaveManifest(result, out / "manifest.json");
  return result;
}

std::vector<size_t> MisclassifiedIndices(const DatasetManifest& val,
                                         const PredictionSet& preds) {
  if (preds.size() != val.items.size()) {
    throw ValidationError("prediction count (" + std::to_string(preds.size()) +
                          ") does not match item count (" +
                          std::to_string(val.items.size()) + ")");
  }
  std::vector<size_t> wrong;
  for (size_t i = 0; i < val.items.size(); ++i) {
    const auto it = preds.records.find(val.items[i].id);
    if (it == preds.records.end()) {
      throw ValidationError("missing prediction for item \"" +
                            val.items[i].id + "\"");
    }
    if (it->second.predicted != val.items[i].label) wrong.push_back(i);
  }
  return wrong;
}

DatasetManifest BuildAdversarialFilterTestset(const DatasetManifest& val,
                                              const fs::path& val_resolved_root,
                                              const PredictionSet& preds,
                                              const fs::path& out) {
  val.Validate();
  const auto wrong = MisclassifiedIndices(val, preds);

  fs::create_directories(out);
  DatasetManifest result;
  result.name = val.name + "_adversarial";
  result.root = ".";
  result.label_space = val.label_space;
  result.geometry = val.geometry;
  result.items.reserve(wrong.size());
  for (const size_t i : wrong) {
    const ItemRecord& item = val.items[i];
    const fs::path src = ItemImagePath(val, val_resolved_root, item);
    std::string ext = src.extension().string();
    if (ext.empty()) ext = ".png";
    const std::string rel = SanitizeFileName(item.id) + ext;
    const auto bytes = ReadFileBytes(src);  // copied unmodified
    AtomicWriteBytes(out / rel, bytes.data(), bytes.size());
    ItemRecord rec = item;
    rec.path = rel;
    result.items.push_back(std::move(rec));
  }
  result.Validate();
  SaveManifest(result, out / "manifest.json");
  return result;
}

}  // namespace robkit
