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

#include "robkit/corrupt_tree.h"

#include <json.hpp>

#include "robkit/error.h"
#include "robkit/io_util.h"
#include "robkit/rng.h"
#include "robkit/thread_pool.h"
#include "robkit/version.h"

namespace robkit {

namespace fs = std::filesystem;
using nlohmann::json;

CorruptedTreeDescriptor BuildCorruptedTestset(const DatasetManifest& manifest,
                                              const fs::path& resolved_root,
                                              CorruptionProfile profile,
                                              uint64_t seed,
                                              const fs::path& out, int threads,
                                              const CorruptionContext& ctx) {
  manifest.Validate();
  if (fs::exists(out)) {
    throw IoError("output directory already exists: " + out.string());
  }
  const auto kinds = KindsForProfile(profile);

  const fs::path parent = out.parent_path().empty() ? "." : out.parent_path();
  fs::create_directories(parent);
  const fs::path tmp = parent / (out.filename().string() + ".tmp-build");
  fs::remove_all(tmp);
  for (const CorruptionKind kind : kinds) {
    for (int sev = 1; sev <= 5; ++sev) {
      fs::create_directories(tmp / KindName(kind) / std::to_string(sev));
    }
  }
  fs::create_directories(tmp / "manifests");

  std::vector<std::string> file_names(manifest.items.size());
  for (size_t i = 0; i < manifest.items.size(); ++i) {
    file_names[i] = SanitizeFileName(manifest.items[i].id) + ".png";
  }

  ParallelFor(manifest.items.size(), threads, [&](size_t i) {
    const ItemRecord& item = manifest.items[i];
    const ImageBuffer src =
        LoadImage(ItemImagePath(manifest, resolved_root, item));
    if (src.width != manifest.geometry.width ||
        src.height != manifest.geometry.height ||
        src.channels != manifest.geometry.channels) {
      throw ValidationError("item \"" + item.id +
                            "\" image does not match manifest geometry");
    }
    for (const CorruptionKind kind : kinds) {
      for (int sev = 1; sev <= 5; ++sev) {
        CorruptionSpec spec;
        spec.kind = kind;
        spec.severity = sev;
        spec.seed = ItemSeed(seed, item.id, KindName(kind), sev);
        const ImageBuffer corrupted = ApplyCorruption(src, spec, ctx);
        const fs::path dst =
            tmp / KindName(kind) / std::to_string(sev) / file_names[i];
        const auto bytes = EncodePng(corrupted);
        AtomicWriteBytes(dst, bytes.data(), bytes.size());
      }
    }
  });

  CorruptedTreeDescriptor desc;
  desc.root = out;
  desc.profile = profile;
  desc.seed = seed;
  desc.severities = {1, 2, 3, 4, 5};
  desc.item_count = manifest.items.size();

  json kinds_json = json::array();
  for (const CorruptionKind kind : kinds) {
    const std::string kind_name(KindName(kind));
    desc.kinds.push_back(kind_name);
    kinds_json.push_back(kind_name);
    for (int sev = 1; sev <= 5; ++sev) {
      DatasetManifest cell;
      cell.name = manifest.name + "_" + kind_name + "_s" + std::to_string(sev);
      cell.root = "../" + kind_name + "/" + std::to_string(sev);
      cell.label_space = manifest.label_space;
      cell.geometry = manifest.geometry;
      cell.items.reserve(manifest.items.size());
      for (size_t i = 0; i < manifest.items.size(); ++i) {
        ItemRecord rec = manifest.items[i];
        rec.path = file_names[i];
        cell.items.push_back(std::move(rec));
      }
      const std::string cell_file =
          kind_name + "_" + std::to_string(sev) + ".manifest.json";
      SaveManifest(cell, tmp / "manifests" / cell_file);
      desc.cell_manifests[{kind_name, sev}] =
          out / "manifests" / cell_file;
    }
  }

  json index;
  index["profile"] = std::string(ProfileName(profile));
  index["seed"] = seed;
  index["kinds"] = kinds_json;
  index["severities"] = {1, 2, 3, 4, 5};
  index["item_count"] = manifest.items.size();
  index["toolkit_version"] = kToolkitVersion;
  index["params_version"] = ctx.table->version();
  AtomicWriteText(tmp / "index.json", index.dump(2) + "\n");

  std::error_code ec;
  fs::rename(tmp, out, ec);
  if (ec) {
    throw IoError("failed to move tree into place: " + ec.message());
  }
  return desc;
}

CorruptedTreeDescriptor LoadCorruptedTree(const fs::path& root) {
  const fs::path index_path = root / "index.json";
  json index;
  try {
    index = json::parse(ReadFileText(index_path));
  } catch (const json::exception& e) {
    throw ValidationError("corrupted-tree index parse failure: " +
                          std::string(e.what()));
  }
  CorruptedTreeDescriptor desc;
  desc.root = root;
  desc.profile =
      ProfileFromName(index.at("profile").get<std::string>());
  desc.seed = index.at("seed").get<uint64_t>();
  desc.item_count = index.at("item_count").get<size_t>();
  for (const auto& k : index.at("kinds")) {
    desc.kinds.push_back(k.get<std::string>());
  }
  for (const auto& s : index.at("severities")) {
    desc.severities.push_back(s.get<int>());
  }
  for (const auto& kind : desc.kinds) {
    for (const int sev : desc.severities) {
      const fs::path cell = root / "manifests" /
                            (kind + "_" + std::to_string(sev) + ".manifest.json");
      if (!fs::exists(cell)) {
        throw ValidationError("corrupted tree lacks cell manifest for (" +
                              kind + ", " + std::to_string(sev) + ")");
      }
      desc.cell_manifests[{kind, sev}] = cell;
    }
  }
  return desc;
}

}  // namespace robkit
