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

#include <doctest.h>

#include "robkit/builders.h"
#include "robkit/error.h"
#include "robkit/image.h"
#include "robkit/io_util.h"
#include "test_util.h"

using namespace robkit;
using robkit::testing::MakeLabelSpace;
using robkit::testing::SyntheticImage;
using robkit::testing::TempDir;

namespace {

namespace fs = std::filesystem;

// <root>/<class_key>/imgN.png source tree.
void WriteClassTree(const fs::path& root,
                    const std::vector<std::pair<std::string, int>>& classes,
                    int width, int height) {
  for (const auto& [key, count] : classes) {
    fs::create_directories(root / key);
    for (int i = 0; i < count; ++i) {
      SavePng(SyntheticImage(width, height, 3,
                             Hash64().Str(key).I64(i).Digest()),
              root / key / ("img" + std::to_string(i) + ".png"));
    }
  }
}

}  // namespace

TEST_CASE("intersect: identical spaces map identically") {
  const auto space = MakeLabelSpace(5);
  const ClassIntersection inter = IntersectClasses(space, space);
  REQUIRE(inter.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(inter.mapping[static_cast<size_t>(i)].first ==
          space[static_cast<size_t>(i)].key);
    CHECK(inter.mapping[static_cast<size_t>(i)].second == i);
  }
}

TEST_CASE("intersect: disjoint spaces yield an empty mapping") {
  const ClassIntersection inter =
      IntersectClasses(MakeLabelSpace(4, "a"), MakeLabelSpace(4, "b"));
  CHECK(inter.size() == 0);
}

TEST_CASE("intersect: partial overlap is exactly the key intersection") {
  auto source = MakeLabelSpace(6, "s");
  auto target = MakeLabelSpace(5, "t");
  source[1].key = "shared_x";
  source[4].key = "shared_y";
  target[0].key = "shared_y";
  target[3].key = "shared_x";
  const ClassIntersection inter = IntersectClasses(source, target);
  REQUIRE(inter.size() == 2);
  // Ordered by target index.
  CHECK(inter.mapping[0] == std::pair<std::string, int>{"shared_y", 0});
  CHECK(inter.mapping[1] == std::pair<std::string, int>{"shared_x", 3});
}

TEST_CASE("manifest from a class tree") {
  TempDir tmp("tree_manifest");
  WriteClassTree(tmp.path() / "src", {{"cat", 3}, {"dog", 2}}, 16, 16);
  const DatasetManifest m = ManifestFromClassTree(tmp.path() / "src", "pets");
  CHECK(m.size() == 5);
  REQUIRE(m.label_space.size() == 2);
  CHECK(m.label_space[0].key == "cat");
  CHECK(m.label_space[1].key == "dog");
  const auto counts = m.PerClassCounts();
  CHECK(counts[0] == 3);
  CHECK(counts[1] == 2);
  CHECK(m.geometry == Geometry{16, 16, 3});
}

TEST_CASE("intersection testset keeps joint classes, relabels, resizes") {
  TempDir tmp("inter_build");
  // Source: 3 classes, two of which exist in the 4-class target space.
  WriteClassTree(tmp.path() / "src",
                 {{"joint_a", 4}, {"only_src", 3}, {"joint_b", 2}}, 48, 48);
  const DatasetManifest src = ManifestFromClassTree(tmp.path() / "src", "src");
  auto target = MakeLabelSpace(4, "t");
  target[2].key = "joint_b";
  target[3].key = "joint_a";
  const ClassIntersection inter = IntersectClasses(src.label_space, target);
  REQUIRE(inter.size() == 2);

  const DatasetManifest built = BuildIntersectionTestset(
      src, tmp.path() / "src", inter, Geometry{16, 16, 3},
      tmp.path() / "out", 1);
  // Output size = sum of source per-class counts over the intersection.
  CHECK(built.size() == 6);
  CHECK(built.label_space.size() == 4);  // full target space
  const auto counts = built.PerClassCounts();
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 2);
  CHECK(counts[3] == 4);
  // Images landed resampled at the target geometry.
  const DatasetManifest reloaded =
      LoadManifest(tmp.path() / "out" / "manifest.json", ImageCheck::kDecode);
  CHECK(reloaded.size() == 6);
  CHECK(reloaded.geometry == Geometry{16, 16, 3});
}

TEST_CASE("intersection testset with an empty intersection is empty") {
  TempDir tmp("inter_empty");
  WriteClassTree(tmp.path() / "src", {{"a", 1}}, 8, 8);
  const DatasetManifest src = ManifestFromClassTree(tmp.path() / "src", "src");
  const ClassIntersection inter =
      IntersectClasses(src.label_space, MakeLabelSpace(2, "zz"));
  const DatasetManifest built = BuildIntersectionTestset(
      src, tmp.path() / "src", inter, Geometry{8, 8, 3}, tmp.path() / "out", 1);
  CHECK(built.size() == 0);
}

TEST_CASE("builders are deterministic and idempotent on rerun") {
  TempDir tmp("inter_idem");
  WriteClassTree(tmp.path() / "src", {{"k", 3}}, 24, 24);
  const DatasetManifest src = ManifestFromClassTree(tmp.path() / "src", "src");
  const ClassIntersection inter =
      IntersectClasses(src.label_space, src.label_space);
  BuildIntersectionTestset(src, tmp.path() / "src", inter, Geometry{12, 12, 3},
                           tmp.path() / "o1", 1);
  BuildIntersectionTestset(src, tmp.path() / "src", inter, Geometry{12, 12, 3},
                           tmp.path() / "o2", 2);
  CHECK(HashTree(tmp.path() / "o1") == HashTree(tmp.path() / "o2"));
  // Rerunning over the same output resolves to identical bytes.
  BuildIntersectionTestset(src, tmp.path() / "src", inter, Geometry{12, 12, 3},
                           tmp.path() / "o1", 1);
  CHECK(HashTree(tmp.path() / "o1") == HashTree(tmp.path() / "o2"));
}

namespace {

struct AdversarialFixture {
  TempDir tmp{"adv"};
  DatasetManifest val;
  fs::path val_root;
  PredictionSet preds;

  // 10 items over 3 classes with exactly 4 wrong predictions.
  AdversarialFixture() {
    const auto manifest_path = robkit::testing::WriteImageFixture(
        tmp.path(), "val", 10, 8, 8, 3, 3, 61);
    val = LoadManifest(manifest_path);
    val_root = ResolveRoot(val, manifest_path);
    for (size_t i = 0; i < val.items.size(); ++i) {
      PredictionRecord rec;
      const bool wrong = i == 1 || i == 4 || i == 6 || i == 9;
      rec.predicted =
          wrong ? (val.items[i].label + 1) % 3 : val.items[i].label;
      rec.label_in_file = val.items[i].label;
      preds.records[val.items[i].id] = rec;
    }
  }
};

}  // namespace

TEST_CASE("adversarial filter keeps exactly the misclassified items") {
  AdversarialFixture fx;
  const DatasetManifest built = BuildAdversarialFilterTestset(
      fx.val, fx.val_root, fx.preds, fx.tmp.path() / "out");
  REQUIRE(built.size() == 4);
  std::set<std::string> ids;
  for (const auto& it : built.items) ids.insert(it.id);
  CHECK(ids == std::set<std::string>{fx.val.items[1].id, fx.val.items[4].id,
                                     fx.val.items[6].id, fx.val.items[9].id});
  // Brute-force recount oracle.
  size_t wrong = 0;
  for (const auto& item : fx.val.items) {
    if (fx.preds.records.at(item.id).predicted != item.label) ++wrong;
  }
  CHECK(built.size() == wrong);
  // Images are copied unmodified.
  const auto& first = built.items.front();
  const auto src_bytes =
      ReadFileBytes(fx.val_root / fs::path(fx.val.items[1].path));
  const auto dst_bytes =
      ReadFileBytes(fx.tmp.path() / "out" / fs::path(first.path));
  CHECK(src_bytes == dst_bytes);
  CHECK(SameLabelSpace(built.label_space, fx.val.label_space));
}

TEST_CASE("adversarial filter with a perfect predictor is empty") {
  AdversarialFixture fx;
  for (auto& [id, rec] : fx.preds.records) {
    rec.predicted = *rec.label_in_file;
  }
  const DatasetManifest built = BuildAdversarialFilterTestset(
      fx.val, fx.val_root, fx.preds, fx.tmp.path() / "out2");
  CHECK(built.size() == 0);
}

TEST_CASE("adversarial filter rejects bad coverage") {
  AdversarialFixture fx;
  PredictionSet missing = fx.preds;
  missing.records.erase(fx.val.items[0].id);
  CHECK_THROWS_AS(MisclassifiedIndices(fx.val, missing), ValidationError);
  PredictionSet extra = fx.preds;
  extra.records["ghost_item"] = PredictionRecord{0, {}, {}};
  CHECK_THROWS_AS(MisclassifiedIndices(fx.val, extra), ValidationError);
}
