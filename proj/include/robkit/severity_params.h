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

#ifndef ROBKIT_SEVERITY_PARAMS_H_
#define ROBKIT_SEVERITY_PARAMS_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>

namespace robkit {

struct LevelParams {
  std::map<std::string, double> values;
  double Get(const std::string& name) const;
};

struct KindParams {
  std::string primary;     // name of the kind's primary intensity parameter
  bool increasing = true;  // direction the primary moves with severity
  std::array<LevelParams, 5> levels;
};

// Per-(resolution profile, kind, severity) kernel parameters. Three
// profiles ship: r28 and r32 carry the 32x32 table and r64 the 64x64
// table; a user file can override everything.
class SeverityTable {
 public:
  static const SeverityTable& Builtin();
  static SeverityTable FromJson(const std::string& text);
  static SeverityTable FromFile(const std::filesystem::path& path);

  const std::string& version() const { return version_; }
  const KindParams& Get(const std::string& profile,
                        const std::string& kind) const;
  const LevelParams& Level(const std::string& profile, const std::string& kind,
                           int severity) const;
  bool HasProfile(const std::string& profile) const {
    return profiles_.count(profile) > 0;
  }

  // r28 for <=28px, r32 for <=32px, r64 otherwise (largest dimension).
  static std::string ProfileForGeometry(int width, int height);

  // Every profile must cover all 15 kinds at 5 severities with a monotone
  // primary parameter. Throws ValidationError.
  void Validate() const;

 private:
  std::string version_;
  std::map<std::string, std::map<std::string, KindParams>> profiles_;
};

}  // namespace robkit

#endif  // ROBKIT_SEVERITY_PARAMS_H_
