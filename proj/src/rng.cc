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

#include "robkit/rng.h"

#include <cmath>
#include <cstring>

namespace robkit {

Hash64& Hash64::Bytes(const void* data, size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001B3ULL;
  }
  return *this;
}

Hash64& Hash64::U64(uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  return Bytes(buf, 8);
}

Hash64& Hash64::Str(std::string_view s) {
  Bytes(s.data(), s.size());
  // Length-delimits the field so ("ab","c") != ("a","bc").
  return U64(s.size());
}

uint64_t ItemSeed(uint64_t seed, std::string_view item_id,
                  std::string_view kind, int severity) {
  return Hash64().U64(seed).Str(item_id).Str(kind).I64(severity).Digest();
}

uint64_t ItemSeed(uint64_t seed, std::string_view item_id) {
  return Hash64().U64(seed).Str(item_id).Digest();
}

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  if (hi <= lo) return lo;
  const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  // Rejection keeps the draw unbiased; the loop terminates with prob ~1.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t v;
  do {
    v = NextU64();
  } while (v >= limit);
  return lo + static_cast<int64_t>(v % span);
}

double Rng::Normal() {
  // Box-Muller without caching so the stream position stays a pure
  // function of the number of calls.
  const double u1 = UniformPos();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::Gamma(double alpha) {
  if (alpha < 1.0) {
    const double u = UniformPos();
    return Gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = Normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = UniformPos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::Beta(double a, double b) {
  const double x = Gamma(a);
  const double y = Gamma(b);
  const double s = x + y;
  if (s <= 0.0) return 0.5;
  return x / s;
}

std::vector<double> Rng::Dirichlet(double alpha, int k) {
  std::vector<double> w(static_cast<size_t>(k));
  double sum = 0.0;
  for (auto& v : w) {
    v = Gamma(alpha);
    sum += v;
  }
  if (sum <= 0.0) {
    for (auto& v : w) v = 1.0 / k;
    return w;
  }
  for (auto& v : w) v /= sum;
  return w;
}

int64_t Rng::Poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    // Knuth multiplication; exact for the small-rate regime.
    const double limit = std::exp(-lambda);
    int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= Uniform();
    } while (p > limit);
    return k - 1;
  }
  // Gaussian approximation for large rates; one draw per sample keeps the
  // per-pixel cost flat for the shot-noise kernel.
  const double v = lambda + std::sqrt(lambda) * Normal();
  return v <= 0.0 ? 0 : static_cast<int64_t>(std::llround(v));
}

}  // namespace robkit
