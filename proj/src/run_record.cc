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

#include "robkit/run_record.h"

#include <json.hpp>

#include "robkit/io_util.h"
#include "robkit/severity_params.h"
#include "robkit/version.h"

namespace robkit {

using nlohmann::json;

void RunRecord::AddInputFile(const std::filesystem::path& path) {
  inputs.emplace_back(path.generic_string(), HexHash(HashFile(path)));
}

void RunRecord::AddOutputFile(const std::filesystem::path& path) {
  outputs.emplace_back(path.generic_string(), HexHash(HashFile(path)));
}

void RunRecord::AddOutputTree(const std::filesystem::path& root) {
  outputs.emplace_back(root.generic_string() + "/",
                       HexHash(HashTree(root)));
}

std::string RunRecordToJson(const RunRecord& record) {
  json doc;
  doc["subcommand"] = record.subcommand;
  doc["arguments"] = record.arguments;
  if (record.seed.has_value()) {
    doc["seed"] = *record.seed;
  } else {
    doc["seed"] = nullptr;
  }
  auto pairs_to_json = [](const auto& pairs) {
    json arr = json::array();
    for (const auto& [path, hash] : pairs) {
      arr.push_back({{"path", path}, {"hash", hash}});
    }
    return arr;
  };
  doc["inputs"] = pairs_to_json(record.inputs);
  doc["outputs"] = pairs_to_json(record.outputs);
  doc["toolkit_version"] = kToolkitVersion;
  doc["params_version"] = SeverityTable::Builtin().version();
  return doc.dump(2) + "\n";
}

void WriteRunRecord(const RunRecord& record,
                    const std::filesystem::path& path) {
  AtomicWriteText(path, RunRecordToJson(record));
}

std::filesystem::path RunRecordPathFor(const std::filesystem::path& output) {
  return output.parent_path() / (output.filename().string() + ".run.json");
}

}  // namespace robkit
