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

#ifndef ROBKIT_PREDICTIONS_H_
#define ROBKIT_PREDICTIONS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace robkit {

struct PredictionRecord {
  int predicted = 0;
  std::optional<double> confidence;  // in [0,1] when present
  // True label as recorded in the file (informational; metrics always take
  // ground truth from the manifest).
  std::optional<int> label_in_file;
};

struct PredictionSet {
  std::string model_id;
  std::string dataset_id;
  std::map<std::string, PredictionRecord> records;  // item id -> record

  size_t size() const { return records.size(); }
};

// CSV with header `item_id,label,pred`, or the logits variant
// `item_id,v0,v1,...` which is converted by argmax with lowest-index
// tie-breaking. Duplicate item ids are an error.
PredictionSet LoadPredictions(const std::filesystem::path& path);
void SavePredictionsCsv(const PredictionSet& preds,
                        const std::filesystem::path& path);

}  // namespace robkit

#endif  // ROBKIT_PREDICTIONS_H_
