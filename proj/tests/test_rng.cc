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

#include <cmath>
#include <set>

#include <doctest.h>

#include "robkit/rng.h"

using namespace robkit;

TEST_CASE("rng streams are pure functions of the key") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t va = a.NextU64();
    all_equal = all_equal && va == b.NextU64();
    any_diff = any_diff || va != c.NextU64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) and matches its moments") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.Uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_int covers the inclusive range") {
  Rng rng(11);
  std::set<int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const int64_t v = rng.UniformInt(-2, 2);
    REQUIRE(v >= -2);
    REQUIRE(v <= 2);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("normal has roughly unit variance") {
  Rng rng(13);
  double sum = 0.0, sumsq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.Normal();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("beta stays in (0,1) and is symmetric around 0.5") {
  Rng rng(17);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double b = rng.Beta(0.8, 0.8);
    REQUIRE(b >= 0.0);
    REQUIRE(b <= 1.0);
    sum += b;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("dirichlet weights form a distribution") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = rng.Dirichlet(1.0, 3);
    REQUIRE(w.size() == 3);
    double sum = 0.0;
    for (const double v : w) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("poisson mean tracks the rate in both regimes") {
  Rng rng(23);
  for (const double lambda : {3.0, 120.0}) {
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.Poisson(lambda));
    CHECK(sum / n == doctest::Approx(lambda).epsilon(0.05));
  }
  CHECK(rng.Poisson(0.0) == 0);
  CHECK(rng.Poisson(-1.0) == 0);
}

TEST_CASE("item seeds separate id, kind, and severity") {
  const uint64_t base = ItemSeed(1, "item_a", "gaussian_noise", 1);
  CHECK(base == ItemSeed(1, "item_a", "gaussian_noise", 1));
  CHECK(base != ItemSeed(2, "item_a", "gaussian_noise", 1));
  CHECK(base != ItemSeed(1, "item_b", "gaussian_noise", 1));
  CHECK(base != ItemSeed(1, "item_a", "shot_noise", 1));
  CHECK(base != ItemSeed(1, "item_a", "gaussian_noise", 2));
  // Length-delimited fields: shifting bytes between fields must not collide.
  CHECK(Hash64().Str("ab").Str("c").Digest() !=
        Hash64().Str("a").Str("bc").Digest());
}
