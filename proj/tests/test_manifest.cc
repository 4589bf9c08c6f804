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
#include <json.hpp>

#include "robkit/error.h"
#include "robkit/manifest.h"
#include "test_util.h"

using namespace robkit;
using robkit::testing::MakeLabelSpace;
using robkit::testing::TempDir;

namespace {

DatasetManifest SmallManifest() {
  DatasetManifest m;
  m.name = "tiny";
  m.root = "images";
  m.label_space = MakeLabelSpace(3);
  m.geometry = Geometry{8, 8, 3};
  for (int i = 0; i < 4; ++i) {
    ItemRecord item;
    item.id = "item" + std::to_string(i);
    item.path = item.id + ".png";
    item.label = i % 3;
    item.source = i == 3 ? Source::kGenerated : Source::kReal;
    if (i == 0) item.provenance = "fixture";
    m.items.push_back(item);
  }
  return m;
}

}  // namespace

TEST_CASE("well-formed manifest reads back with counts preserved") {
  TempDir tmp("manifest");
  const DatasetManifest m = SmallManifest();
  SaveManifest(m, tmp.path() / "m.json");
  const DatasetManifest back = LoadManifest(tmp.path() / "m.json");
  CHECK(back.size() == 4);
  CHECK(back.CountBySource(Source::kReal) == 3);
  CHECK(back.CountBySource(Source::kGenerated) == 1);
  // Logical round trip: order, ids, labels, sources, provenance.
  REQUIRE(back.items.size() == m.items.size());
  for (size_t i = 0; i < m.items.size(); ++i) {
    CHECK(back.items[i].id == m.items[i].id);
    CHECK(back.items[i].path == m.items[i].path);
    CHECK(back.items[i].label == m.items[i].label);
    CHECK(back.items[i].source == m.items[i].source);
    CHECK(back.items[i].provenance == m.items[i].provenance);
  }
  CHECK(back.name == m.name);
  CHECK(back.root == m.root);
  CHECK(back.geometry == m.geometry);
  CHECK(SameLabelSpace(back.label_space, m.label_space));
}

TEST_CASE("manifest json uses the documented field names") {
  const std::string text = ManifestToJson(SmallManifest());
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.contains("name"));
  CHECK(doc.contains("root"));
  CHECK(doc.at("geometry").contains("width"));
  CHECK(doc.at("geometry").contains("height"));
  CHECK(doc.at("geometry").contains("channels"));
  CHECK(doc.at("label_space")[0].contains("index"));
  CHECK(doc.at("label_space")[0].contains("key"));
  CHECK(doc.at("label_space")[0].contains("display_name"));
  CHECK(doc.at("items")[0].contains("id"));
  CHECK(doc.at("items")[0].contains("path"));
  CHECK(doc.at("items")[0].contains("label"));
  CHECK(doc.at("items")[0].contains("source"));
  CHECK(doc.at("items")[0].contains("provenance"));
  CHECK_FALSE(doc.at("items")[1].contains("provenance"));
}

TEST_CASE("label index at K is rejected") {
  DatasetManifest m = SmallManifest();
  m.items[1].label = 3;  // K == 3, valid range is [0, 3)
  CHECK_THROWS_WITH_AS(m.Validate(),
                       doctest::Contains("label out of range"),
                       ValidationError);
}

TEST_CASE("duplicate item ids are rejected") {
  DatasetManifest m = SmallManifest();
  m.items[2].id = "item0";
  CHECK_THROWS_WITH_AS(m.Validate(), doctest::Contains("duplicate item id"),
                       ValidationError);
}

TEST_CASE("duplicate class keys and indices are rejected") {
  DatasetManifest m = SmallManifest();
  m.label_space[1].key = m.label_space[0].key;
  CHECK_THROWS_AS(m.Validate(), ValidationError);
  DatasetManifest m2 = SmallManifest();
  m2.label_space[1].index = 0;
  CHECK_THROWS_AS(m2.Validate(), ValidationError);
}

TEST_CASE("parse failure carries a clear error") {
  CHECK_THROWS_AS(ParseManifestJson("{not json"), ValidationError);
  CHECK_THROWS_AS(ParseManifestJson("{\"name\": \"x\"}"), ValidationError);
}

TEST_CASE("validation mode rejects unresolvable images") {
  TempDir tmp("manifest_val");
  DatasetManifest m = SmallManifest();
  SaveManifest(m, tmp.path() / "m.json");
  // No image files exist underneath root.
  CHECK_THROWS_WITH_AS(LoadManifest(tmp.path() / "m.json", ImageCheck::kDecode),
                       doctest::Contains("unresolvable"), ValidationError);
  // Plain load does not touch images.
  CHECK_NOTHROW(LoadManifest(tmp.path() / "m.json"));
}

TEST_CASE("validation mode enforces declared geometry") {
  TempDir tmp("manifest_geom");
  const auto manifest_path = robkit::testing::WriteImageFixture(
      tmp.path(), "geom", 3, 8, 8, 3, 2, 99);
  DatasetManifest m = LoadManifest(manifest_path);
  m.geometry.width = 9;
  SaveManifest(m, tmp.path() / "bad.json");
  // Root is relative to the manifest's directory, so this still resolves.
  CHECK_THROWS_WITH_AS(LoadManifest(tmp.path() / "bad.json", ImageCheck::kDecode),
                       doctest::Contains("geometry"), ValidationError);
}
