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

#include <algorithm>
#include <random>

#include <doctest.h>

#include "robkit/error.h"
#include "robkit/io_util.h"
#include "robkit/metrics.h"
#include "robkit/rng.h"
#include "test_util.h"

using namespace robkit;
using robkit::testing::MakeLabelSpace;
using robkit::testing::TempDir;

namespace {

DatasetManifest LabelOnlyManifest(const std::vector<int>& labels,
                                  int num_classes) {
  DatasetManifest m;
  m.name = "labels";
  m.root = ".";
  m.label_space = MakeLabelSpace(num_classes);
  m.geometry = Geometry{1, 1, 3};
  for (size_t i = 0; i < labels.size(); ++i) {
    ItemRecord item;
    item.id = "i" + std::to_string(i);
    item.path = item.id + ".png";
    item.label = labels[i];
    m.items.push_back(std::move(item));
  }
  return m;
}

PredictionSet PredsFor(const DatasetManifest& m,
                       const std::vector<int>& predicted) {
  PredictionSet preds;
  for (size_t i = 0; i < m.items.size(); ++i) {
    preds.records[m.items[i].id] = PredictionRecord{predicted[i], {}, {}};
  }
  return preds;
}

CorruptionErrorMatrix RandomMatrix(Rng& rng, size_t kinds, size_t sevs) {
  CorruptionErrorMatrix matrix;
  for (size_t k = 0; k < kinds; ++k) {
    matrix.kinds.push_back("kind_" + std::to_string(k));
    std::vector<double> row;
    for (size_t s = 0; s < sevs; ++s) row.push_back(rng.Uniform(0.0, 100.0));
    matrix.errors.push_back(std::move(row));
  }
  for (size_t s = 0; s < sevs; ++s) {
    matrix.severities.push_back(static_cast<int>(s + 1));
  }
  return matrix;
}

}  // namespace

TEST_CASE("clean error endpoints and arithmetic") {
  const DatasetManifest m = LabelOnlyManifest({0, 1, 2, 0}, 3);
  CHECK(CleanError(m, PredsFor(m, {0, 1, 2, 0})) == 0.0);
  CHECK(CleanError(m, PredsFor(m, {1, 2, 0, 1})) == 100.0);
  CHECK(CleanError(m, PredsFor(m, {0, 1, 2, 1})) == doctest::Approx(25.0));
}

TEST_CASE("clean error enforces exact coverage") {
  const DatasetManifest m = LabelOnlyManifest({0, 1}, 2);
  PredictionSet missing = PredsFor(m, {0, 1});
  missing.records.erase("i1");
  CHECK_THROWS_AS(CleanError(m, missing), ValidationError);
  PredictionSet extra = PredsFor(m, {0, 1});
  extra.records["ghost"] = PredictionRecord{0, {}, {}};
  CHECK_THROWS_AS(CleanError(m, extra), ValidationError);
}

TEST_CASE("flipping one wrong prediction lowers error by exactly 100/N") {
  Rng rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng.UniformInt(0, 40));
    std::vector<int> labels, preds;
    for (int i = 0; i < n; ++i) {
      labels.push_back(static_cast<int>(rng.UniformInt(0, 4)));
      preds.push_back(static_cast<int>(rng.UniformInt(0, 4)));
    }
    // Force at least one wrong entry, then fix it.
    preds[0] = (labels[0] + 1) % 5;
    const DatasetManifest m = LabelOnlyManifest(labels, 5);
    const double before = CleanError(m, PredsFor(m, preds));
    preds[0] = labels[0];
    const double after = CleanError(m, PredsFor(m, preds));
    CHECK(before - after == doctest::Approx(100.0 / n).epsilon(1e-9));
  }
}

TEST_CASE("error matrix: all-correct grid is zero, missing cell is named") {
  const DatasetManifest m = LabelOnlyManifest({0, 1, 1}, 2);
  const PredictionSet good = PredsFor(m, {0, 1, 1});
  std::map<std::pair<std::string, int>,
           std::pair<const DatasetManifest*, const PredictionSet*>>
      cells;
  for (const std::string kind : {"gaussian_noise", "fog"}) {
    for (int sev = 1; sev <= 5; ++sev) cells[{kind, sev}] = {&m, &good};
  }
  const CorruptionErrorMatrix matrix =
      BuildErrorMatrix({"gaussian_noise", "fog"}, {1, 2, 3, 4, 5}, cells);
  for (const auto& row : matrix.errors) {
    for (const double e : row) CHECK(e == 0.0);
  }
  cells.erase({"fog", 3});
  CHECK_THROWS_WITH_AS(
      BuildErrorMatrix({"gaussian_noise", "fog"}, {1, 2, 3, 4, 5}, cells),
      doctest::Contains("(fog, 3)"), ValidationError);
}

TEST_CASE("error matrix entries match a naive recount") {
  Rng rng(505);
  const DatasetManifest m = LabelOnlyManifest({0, 1, 2, 1, 0, 2, 2, 1}, 3);
  std::vector<PredictionSet> preds_store;
  preds_store.reserve(2 * 5);
  std::map<std::pair<std::string, int>,
           std::pair<const DatasetManifest*, const PredictionSet*>>
      cells;
  std::map<std::pair<std::string, int>, double> expected;
  for (const std::string kind : {"a", "b"}) {
    for (int sev = 1; sev <= 5; ++sev) {
      std::vector<int> p;
      for (size_t i = 0; i < m.items.size(); ++i) {
        p.push_back(static_cast<int>(rng.UniformInt(0, 2)));
      }
      size_t wrong = 0;
      for (size_t i = 0; i < m.items.size(); ++i) {
        if (p[i] != m.items[i].label) ++wrong;
      }
      expected[{kind, sev}] = 100.0 * wrong / m.items.size();
      preds_store.push_back(PredsFor(m, p));
      cells[{kind, sev}] = {&m, &preds_store.back()};
    }
  }
  const CorruptionErrorMatrix matrix =
      BuildErrorMatrix({"a", "b"}, {1, 2, 3, 4, 5}, cells);
  for (size_t k = 0; k < matrix.kinds.size(); ++k) {
    for (size_t s = 0; s < matrix.severities.size(); ++s) {
      CHECK(matrix.errors[k][s] ==
            doctest::Approx(expected[{matrix.kinds[k], matrix.severities[s]}])
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("mce of {10,20,30,40} over a 2x2 grid is 25") {
  CorruptionErrorMatrix matrix;
  matrix.kinds = {"a", "b"};
  matrix.severities = {1, 2};
  matrix.errors = {{10.0, 20.0}, {30.0, 40.0}};
  CHECK(Mce(matrix) == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("mce is permutation invariant and matches brute force") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    CorruptionErrorMatrix matrix = RandomMatrix(rng, 15, 5);
    double brute = 0.0;
    for (const auto& row : matrix.errors) {
      for (const double e : row) brute += e;
    }
    brute /= 15.0 * 5.0;
    CHECK(Mce(matrix) == doctest::Approx(brute).epsilon(1e-12));

    CorruptionErrorMatrix shuffled = matrix;
    std::mt19937 gen(trial);
    std::vector<size_t> order(matrix.kinds.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    for (size_t i = 0; i < order.size(); ++i) {
      shuffled.kinds[i] = matrix.kinds[order[i]];
      shuffled.errors[i] = matrix.errors[order[i]];
      std::reverse(shuffled.errors[i].begin(), shuffled.errors[i].end());
    }
    std::reverse(shuffled.severities.begin(), shuffled.severities.end());
    CHECK(Mce(shuffled) == doctest::Approx(Mce(matrix)).epsilon(1e-12));
  }
}

TEST_CASE("normalized mce: identical baseline gives exactly 1") {
  Rng rng(707);
  const CorruptionErrorMatrix matrix = RandomMatrix(rng, 6, 5);
  CHECK(NormalizedMce(matrix, matrix) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized mce rejects grid mismatch and zero baselines") {
  Rng rng(808);
  const CorruptionErrorMatrix matrix = RandomMatrix(rng, 3, 5);
  CorruptionErrorMatrix other = RandomMatrix(rng, 4, 5);
  CHECK_THROWS_AS(NormalizedMce(matrix, other), ValidationError);
  CorruptionErrorMatrix zero = matrix;
  for (auto& e : zero.errors[1]) e = 0.0;
  CHECK_THROWS_AS(NormalizedMce(matrix, zero), ValidationError);
}

TEST_CASE("delta display strings match the published annotations") {
  CHECK(FormatSignedDelta(44.1 - 50.3) == "-6.2");
  CHECK(FormatSignedDelta(77.7 - 80.6) == "-2.9");
  CHECK(FormatSignedDelta(0.0) == "±0.0");
  CHECK(FormatSignedDelta(0.04) == "±0.0");
  CHECK(FormatSignedDelta(0.05) == "+0.1");
  CHECK(FormatSignedDelta(-1.25) == "-1.3");  // half away from zero
  CHECK(FormatSignedDelta(84.8 - 83.6) == "+1.2");
}

TEST_CASE("delta report flags improvements and rejects metric mismatch") {
  EvalReport before;
  before.model_id = "m";
  before.dataset_id = "d";
  before.clean_error = 50.3;
  before.matrix.kinds = {"k"};
  before.matrix.severities = {1};
  before.matrix.errors = {{80.6}};
  before.mce = 80.6;
  EvalReport after = before;
  after.clean_error = 44.1;
  after.matrix.errors = {{77.7}};
  after.mce = 77.7;
  const auto rows = DeltaReport(before, after);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].metric == "clean_error");
  CHECK(rows[0].display == "-6.2");
  CHECK(rows[0].improved);
  CHECK(rows[1].metric == "mce");
  CHECK(rows[1].display == "-2.9");
  CHECK(rows[1].improved);

  const auto same = DeltaReport(before, before);
  for (const auto& row : same) {
    CHECK(row.display == "±0.0");
    CHECK_FALSE(row.improved);
  }

  EvalReport no_mce = before;
  no_mce.matrix = CorruptionErrorMatrix{};
  no_mce.mce.reset();
  CHECK_THROWS_AS(DeltaReport(before, no_mce), ValidationError);
  EvalReport other_dataset = after;
  other_dataset.dataset_id = "other";
  CHECK_THROWS_AS(DeltaReport(before, other_dataset), ValidationError);
}

TEST_CASE("eval report round-trips losslessly at full precision") {
  Rng rng(909);
  EvalReport report;
  report.model_id = "deit_ti";
  report.dataset_id = "fixture";
  report.profile = "natural";
  report.clean_error = 37.123456789012345;
  report.matrix = RandomMatrix(rng, 15, 5);
  report.mce = Mce(report.matrix);
  report.normalized_mce = 0.87654321987654;
  const std::string text = EvalReportToJson(report);
  const EvalReport back = EvalReportFromJson(text);
  CHECK(back.clean_error == report.clean_error);
  REQUIRE(back.mce.has_value());
  CHECK(*back.mce == *report.mce);
  CHECK(*back.normalized_mce == *report.normalized_mce);
  CHECK(back.matrix.kinds == report.matrix.kinds);
  CHECK(back.matrix.errors == report.matrix.errors);

  // The stored mCE must recompute from the matrix.
  EvalReport broken = report;
  broken.mce = *report.mce + 0.5;
  CHECK_THROWS_AS(EvalReportFromJson(EvalReportToJson(broken)),
                  ValidationError);
}

TEST_CASE("matrix csv round trip") {
  TempDir tmp("matrix_csv");
  Rng rng(111);
  const CorruptionErrorMatrix matrix = RandomMatrix(rng, 4, 5);
  SaveMatrixCsv(matrix, tmp.path() / "m.csv");
  const CorruptionErrorMatrix back = LoadMatrixCsv(tmp.path() / "m.csv");
  CHECK(back.kinds == matrix.kinds);
  CHECK(back.severities == matrix.severities);
  REQUIRE(back.errors.size() == matrix.errors.size());
  for (size_t k = 0; k < matrix.errors.size(); ++k) {
    for (size_t s = 0; s < matrix.errors[k].size(); ++s) {
      CHECK(back.errors[k][s] ==
            doctest::Approx(matrix.errors[k][s]).epsilon(1e-15));
    }
  }
}

TEST_CASE("prediction csv and logits parsing") {
  TempDir tmp("preds");
  AtomicWriteText(tmp.path() / "hard.csv",
                  "item_id,label,pred\na,0,1\nb,1,1\n");
  const PredictionSet hard = LoadPredictions(tmp.path() / "hard.csv");
  CHECK(hard.size() == 2);
  CHECK(hard.records.at("a").predicted == 1);
  CHECK(hard.records.at("a").label_in_file == 0);

  // Argmax with lowest-index tie-breaking.
  AtomicWriteText(tmp.path() / "logits.csv",
                  "item_id,v0,v1,v2\na,0.5,0.5,0.1\nb,-1,2,2\n");
  const PredictionSet logits = LoadPredictions(tmp.path() / "logits.csv");
  CHECK(logits.records.at("a").predicted == 0);
  CHECK(logits.records.at("b").predicted == 1);

  AtomicWriteText(tmp.path() / "dup.csv", "item_id,label,pred\na,0,1\na,0,2\n");
  CHECK_THROWS_WITH_AS(LoadPredictions(tmp.path() / "dup.csv"),
                       doctest::Contains("duplicate"), ValidationError);
  AtomicWriteText(tmp.path() / "bad.csv", "who,what\n");
  CHECK_THROWS_AS(LoadPredictions(tmp.path() / "bad.csv"), ValidationError);
}
