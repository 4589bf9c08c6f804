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

#ifndef ROBKIT_RNG_H_
#define ROBKIT_RNG_H_

#include <cstdint>
#include <string_view>
#include <vector>

namespace robkit {

// splitmix64 finalizer; the bit pattern is fixed on every platform.
inline uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Keyed 64-bit hash (FNV-1a accumulation + splitmix finalizer). Used to
// derive per-item RNG keys: Hash64().U64(seed).Str(id).Str(kind).U64(sev).
class Hash64 {
 public:
  Hash64&Bytes(const void* data, size_t size);
  Hash64& U64(uint64_t v);
  Hash64& I64(int64_t v) { return U64(static_cast<uint64_t>(v)); }
  Hash64& Str(std::string_view s);
  uint64_t Digest() const { return Mix64(state_); }

 private:
  uint64_t state_ = 0xCBF29CE484222325ULL;
};

uint64_t ItemSeed(uint64_t seed, std::string_view item_id,
                  std::string_view kind, int severity);
uint64_t ItemSeed(uint64_t seed, std::string_view item_id);

// Counter-based generator: the n-th output is Mix64(key + n*golden), so the
// stream is a pure function of (key, n) — reproducible under any threading
// or call order as long as each consumer owns its own key.
class Rng {
 public:
  explicit Rng(uint64_t key) : key_(key) {}

  uint64_t NextU64() { return Mix64(key_ + (++counter_) * kGolden); }

  // [0, 1)
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }
  // (0, 1]
  double UniformPos() { return 1.0 - Uniform(); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Inclusive on both ends.
  int64_t UniformInt(int64_t lo, int64_t hi);
  bool Bernoulli(double p) { return Uniform() < p; }

  double Normal();
  double Gamma(double alpha);
  double Beta(double a, double b);
  std::vector<double> Dirichlet(double alpha, int k);
  int64_t Poisson(double lambda);

  uint64_t counter() const { return counter_; }

 private:
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace robkit

#endif  // ROBKIT_RNG_H_
