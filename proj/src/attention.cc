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

#include "robkit/attention.h"

#include <cmath>
#include <cstring>

#include <json.hpp>

#include "robkit/error.h"
#include "robkit/io_util.h"

namespace robkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kRowSumTolerance = 1e-4;
constexpr float kNegativeTolerance = -1e-6f;

}  // namespace

void AttentionDump::Validate() const {
  const int spatial = grid_rows * grid_cols;
  const int expected_tokens = spatial + (cls_present ? 1 : 0);
  if (layers <= 0 || heads <= 0 || grid_rows <= 0 || grid_cols <= 0 ||
      patch_size <= 0) {
    throw ValidationError("attention dump geometry must be positive");
  }
  if (tokens != expected_tokens) {
    throw ValidationError("token count " + std::to_string(tokens) +
                          " does not match grid geometry (expected " +
                          std::to_string(expected_tokens) + ")");
  }
  if (weights.size() != static_cast<size_t>(layers)) {
    throw ValidationError("attention dump layer count mismatch");
  }
  const size_t per_layer =
      static_cast<size_t>(heads) * tokens * tokens;
  for (int layer = 0; layer < layers; ++layer) {
    const auto& w = weights[static_cast<size_t>(layer)];
    if (w.size() != per_layer) {
      throw ValidationError("layer " + std::to_string(layer) +
                            " has wrong weight count");
    }
    for (int h = 0; h < heads; ++h) {
      for (int q = 0; q < tokens; ++q) {
        const float* row =
            &w[(static_cast<size_t>(h) * tokens + q) * tokens];
        double sum = 0.0;
        for (int k = 0; k < tokens; ++k) {
          if (row[k] < kNegativeTolerance) {
            throw ValidationError("negative attention weight in layer " +
                                  std::to_string(layer));
          }
          sum += row[k];
        }
        if (std::fabs(sum - 1.0) > kRowSumTolerance) {
          throw ValidationError(
              "attention row is not stochastic (layer " +
              std::to_string(layer) + ", head " + std::to_string(h) +
              ", query " + std::to_string(q) + ", sum " +
              std::to_string(sum) + ")");
        }
      }
    }
  }
}

AttentionDump LoadAttentionDump(const fs::path& dir) {
  json meta;
  try {
    meta = json::parse(ReadFileText(dir / "meta.json"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("attention meta parse failure: ") +
                          e.what());
  }
  AttentionDump dump;
  try {
    dump.layers = meta.at("layers").get<int>();
    dump.heads = meta.at("heads").get<int>();
    dump.tokens = meta.at("T").get<int>();
    dump.grid_rows = meta.at("R").get<int>();
    dump.grid_cols = meta.at("C").get<int>();
    dump.patch_size = meta.at("P").get<int>();
    dump.cls_present = meta.at("cls_present").get<bool>();
    if (meta.at("dtype").get<std::string>() != "f32le") {
      throw ValidationError("attention dump dtype must be f32le");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("attention meta schema violation: ") +
                          e.what());
  }
  const size_t per_layer =
      static_cast<size_t>(dump.heads) * dump.tokens * dump.tokens;
  dump.weights.resize(static_cast<size_t>(dump.layers));
  for (int layer = 0; layer < dump.layers; ++layer) {
    const fs::path bin = dir / ("layer_" + std::to_string(layer) + ".bin");
    const auto bytes = ReadFileBytes(bin);
    if (bytes.size() != per_layer * sizeof(float)) {
      throw ValidationError("layer file " + bin.string() +
                            " has unexpected size");
    }
    auto& w = dump.weights[static_cast<size_t>(layer)];
    w.resize(per_layer);
    // Files are little-endian f32; so are all supported targets.
    std::memcpy(w.data(), bytes.data(), bytes.size());
  }
  dump.Validate();
  return dump;
}

void SaveAttentionDump(const AttentionDump& dump, const fs::path& dir) {
  dump.Validate();
  fs::create_directories(dir);
  json meta;
  meta["layers"] = dump.layers;
  meta["heads"] = dump.heads;
  meta["T"] = dump.tokens;
  meta["R"] = dump.grid_rows;
  meta["C"] = dump.grid_cols;
  meta["P"] = dump.patch_size;
  meta["cls_present"] = dump.cls_present;
  meta["dtype"] = "f32le";
  AtomicWriteText(dir / "meta.json", meta.dump(2) + "\n");
  for (int layer = 0; layer < dump.layers; ++layer) {
    const auto& w = dump.weights[static_cast<size_t>(layer)];
    AtomicWriteBytes(dir / ("layer_" + std::to_string(layer) + ".bin"),
                     w.data(), w.size() * sizeof(float));
  }
}

AttentionDistances MeanAttentionDistance(const AttentionDump& dump) {
  dump.Validate();
  const int spatial = dump.grid_rows * dump.grid_cols;
  const int offset = dump.cls_present ? 1 : 0;
  const int T = dump.tokens;

  // Pairwise patch-center distances in pixels.
  std::vector<double> dist(static_cast<size_t>(spatial) * spatial);
  for (int q = 0; q < spatial; ++q) {
    const int rq = q / dump.grid_cols;
    const int cq = q % dump.grid_cols;
    for (int k = 0; k < spatial; ++k) {
      const int rk = k / dump.grid_cols;
      const int ck = k % dump.grid_cols;
      const double dr = rq - rk;
      const double dc = cq - ck;
      dist[static_cast<size_t>(q) * spatial + k] =
          dump.patch_size * std::sqrt(dr * dr + dc * dc);
    }
  }

  AttentionDistances out;
  out.per_head.assign(static_cast<size_t>(dump.layers),
                      std::vector<double>(static_cast<size_t>(dump.heads), 0.0));
  out.per_layer_mean.assign(static_cast<size_t>(dump.layers), 0.0);
  for (int layer = 0; layer < dump.layers; ++layer) {
    const auto& w = dump.weights[static_cast<size_t>(layer)];
    double layer_sum = 0.0;
    for (int h = 0; h < dump.heads; ++h) {
      double head_sum = 0.0;
      for (int q = 0; q < spatial; ++q) {
        const float* row =
            &w[(static_cast<size_t>(h) * T + (q + offset)) * T];
        double mass = 0.0;
        double acc = 0.0;
        for (int k = 0; k < spatial; ++k) {
          const double weight = std::max(0.0f, row[k + offset]);
          mass += weight;
          acc += weight * dist[static_cast<size_t>(q) * spatial + k];
        }
        if (mass <= 1e-12) {
          throw ValidationError(
              "query attends only to the class token; spatial "
              "renormalization is undefined (layer " +
              std::to_string(layer) + ", head " + std::to_string(h) + ")");
        }
        head_sum += acc / mass;
      }
      const double head_mean = head_sum / spatial;
      out.per_head[static_cast<size_t>(layer)][static_cast<size_t>(h)] =
          head_mean;
      layer_sum += head_mean;
    }
    out.per_layer_mean[static_cast<size_t>(layer)] = layer_sum / dump.heads;
  }
  return out;
}

}  // namespace robkit
