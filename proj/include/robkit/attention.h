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

#ifndef ROBKIT_ATTENTION_H_
#define ROBKIT_ATTENTION_H_

#include <filesystem>
#include <vector>

namespace robkit {

// Row-stochastic attention matrices per layer and head, plus the patch-grid
// geometry. When cls_present, token 0 is the class token and
// T = rows*cols + 1, else T = rows*cols. Spatial tokens are laid out
// row-major over the grid.
struct AttentionDump {
  int layers = 0;
  int heads = 0;
  int tokens = 0;      // T
  int grid_rows = 0;   // R
  int grid_cols = 0;   // C
  int patch_size = 0;  // P, pixels
  bool cls_present = false;
  // weights[layer][head*T*T + q*T + k]
  std::vector<std::vector<float>> weights;

  void Validate() const;  // geometry, non-negativity, row sums within 1e-4
};

// Directory format: meta.json + layer_<i>.bin of little-endian f32 in
// [head][query][key] order.
AttentionDump LoadAttentionDump(const std::filesystem::path& dir);
void SaveAttentionDump(const AttentionDump& dump,
                       const std::filesystem::path& dir);

struct AttentionDistances {
  // distances[layer][head], pixels
  std::vector<std::vector<double>> per_head;
  std::vector<double> per_layer_mean;
};

// Attention-weighted mean pixel distance between query and key patches,
// averaged over spatial queries. The class token's row and column are
// excluded and each row is renormalized over spatial keys.
AttentionDistances MeanAttentionDistance(const AttentionDump& dump);

}  // namespace robkit

#endif  // ROBKIT_ATTENTION_H_
