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

#ifndef ROBKIT_RUN_RECORD_H_
#define ROBKIT_RUN_RECORD_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace robkit {

// Machine-readable audit trail accompanying every CLI output. Contains no
// timestamps so identical runs yield byte-identical records.
struct RunRecord {
  std::string subcommand;
  std::vector<std::string> arguments;
  std::optional<uint64_t> seed;
  // (label or path, content hash hex)
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;

  void AddInputFile(const std::filesystem::path& path);
  void AddOutputFile(const std::filesystem::path& path);
  void AddOutputTree(const std::filesystem::path& root);
};

std::string RunRecordToJson(const RunRecord& record);
void WriteRunRecord(const RunRecord& record,
                    const std::filesystem::path& path);

// Sibling record path for a file output: `<file>.run.json`.
std::filesystem::path RunRecordPathFor(const std::filesystem::path& output);

}  // namespace robkit

#endif  // ROBKIT_RUN_RECORD_H_
