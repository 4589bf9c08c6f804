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

#include "robkit/manifest.h"

#include <set>
#include <unordered_set>

#include <json.hpp>

#include "robkit/error.h"
#include "robkit/image.h"
#include "robkit/io_util.h"

namespace robkit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string SourceName(Source s) {
  return s == Source::kReal ? "real" : "generated";
}

Source SourceFromName(const std::string& name) {
  if (name == "real") return Source::kReal;
  if (name == "generated") return Source::kGenerated;
  throw ValidationError("unknown item source: \"" + name + "\"");
}

size_t DatasetManifest::CountBySource(Source s) const {
  size_t n = 0;
  for (const auto& it : items) {
    if (it.source == s) ++n;
  }
  return n;
}

std::vector<size_t> DatasetManifest::PerClassCounts() const {
  std::vector<size_t> counts(label_space.size(), 0);
  for (const auto& it : items) {
    if (it.label >= 0 && static_cast<size_t>(it.label) < counts.size()) {
      ++counts[static_cast<size_t>(it.label)];
    }
  }
  return counts;
}

void DatasetManifest::Validate() const {
  const size_t k = label_space.size();
  std::vector<bool> seen_index(k, false);
  std::unordered_set<std::string> keys;
  for (const auto& cls : label_space) {
    if (cls.index < 0 || static_cast<size_t>(cls.index) >= k) {
      throw ValidationError("label space index out of range: " +
                            std::to_string(cls.index));
    }
    if (seen_index[static_cast<size_t>(cls.index)]) {
      throw ValidationError("duplicate label index: " +
                            std::to_string(cls.index));
    }
    seen_index[static_cast<size_t>(cls.index)] = true;
    if (!keys.insert(cls.key).second) {
      throw ValidationError("duplicate class key: \"" + cls.key + "\"");
    }
  }
  if (geometry.channels != 1 && geometry.channels != 3) {
    throw ValidationError("geometry channels must be 1 or 3");
  }
  std::unordered_set<std::string> ids;
  ids.reserve(items.size());
  for (const auto& it : items) {
    if (!ids.insert(it.id).second) {
      throw ValidationError("duplicate item id: \"" + it.id + "\"");
    }
    if (it.label < 0 || static_cast<size_t>(it.label) >= k) {
      throw ValidationError("label out of range for item \"" + it.id +
                            "\": " + std::to_string(it.label));
    }
  }
}

bool SameLabelSpace(const std::vector<ClassDescriptor>& a,
                    const std::vector<ClassDescriptor>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].key != b[i].key || a[i].index != b[i].index) return false;
  }
  return true;
}

DatasetManifest ParseManifestJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest parse failure: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.name = doc.at("name").get<std::string>();
    m.root = doc.at("root").get<std::string>();
    const auto& g = doc.at("geometry");
    m.geometry.width = g.at("width").get<int>();
    m.geometry.height = g.at("height").get<int>();
    m.geometry.channels = g.at("channels").get<int>();
    for (const auto& c : doc.at("label_space")) {
      ClassDescriptor cls;
      cls.index = c.at("index").get<int>();
      cls.key = c.at("key").get<std::string>();
      cls.display_name = c.value("display_name", cls.key);
      m.label_space.push_back(std::move(cls));
    }
    for (const auto& r : doc.at("items")) {
      ItemRecord item;
      item.id = r.at("id").get<std::string>();
      item.path = r.at("path").get<std::string>();
      item.label = r.at("label").get<int>();
      item.source = SourceFromName(r.at("source").get<std::string>());
      item.provenance = r.value("provenance", std::string());
      m.items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest schema violation: ") +
                          e.what());
  }
  m.Validate();
  return m;
}

std::string ManifestToJson(const DatasetManifest& m) {
  json doc;
  doc["name"] = m.name;
  doc["root"] = m.root;
  doc["geometry"] = {{"width", m.geometry.width},
                     {"height", m.geometry.height},
                     {"channels", m.geometry.channels}};
  json space = json::array();
  for (const auto& cls : m.label_space) {
    space.push_back({{"index", cls.index},
                     {"key", cls.key},
                     {"display_name", cls.display_name}});
  }
  doc["label_space"] = std::move(space);
  json items = json::array();
  for (const auto& it : m.items) {
    json r = {{"id", it.id},
              {"path", it.path},
              {"label", it.label},
              {"source", SourceName(it.source)}};
    if (!it.provenance.empty()) r["provenance"] = it.provenance;
    items.push_back(std::move(r));
  }
  doc["items"] = std::move(items);
  return doc.dump(2) + "\n";
}

DatasetManifest LoadManifest(const fs::path& path, ImageCheck check) {
  DatasetManifest m = ParseManifestJson(ReadFileText(path));
  if (check == ImageCheck::kDecode) {
    const fs::path root = ResolveRoot(m, path);
    for (const auto& item : m.items) {
      const fs::path img_path = ItemImagePath(m, root, item);
      ImageBuffer img;
      try {
        img = LoadImage(img_path);
      } catch (const IoError& e) {
        throw ValidationError("item \"" + item.id +
                              "\" has unresolvable or undecodable image: " +
                              e.what());
      }
      if (img.width != m.geometry.width || img.height != m.geometry.height ||
          img.channels != m.geometry.channels) {
        throw ValidationError("item \"" + item.id +
                              "\" image does not match manifest geometry");
      }
    }
  }
  return m;
}

void SaveManifest(const DatasetManifest& m, const fs::path& path) {
  m.Validate();
  AtomicWriteText(path, ManifestToJson(m));
}

fs::path ResolveRoot(const DatasetManifest& m, const fs::path& manifest_path) {
  fs::path root(m.root);
  if (root.is_absolute()) return root;
  fs::path base = manifest_path.parent_path();
  if (base.empty()) base = ".";
  return base / root;
}

fs::path ItemImagePath(const DatasetManifest&, const fs::path& resolved_root,
                       const ItemRecord& item) {
  return resolved_root / fs::path(item.path);
}

}  // namespace robkit
