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

#include "robkit/severity_params.h"

#include <json.hpp>

#include "robkit/corruptions.h"
#include "robkit/error.h"
#include "robkit/io_util.h"
#include "robkit_severity_params_data.h"

namespace robkit {

using nlohmann::json;

double LevelParams::Get(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) {
    throw ValidationError("severity table lacks parameter \"" + name + "\"");
  }
  return it->second;
}

const SeverityTable& SeverityTable::Builtin() {
  static const SeverityTable table = FromJson(kBuiltinSeverityParamsJson);
  return table;
}

SeverityTable SeverityTable::FromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("severity table parse failure: ") +
                          e.what());
  }
  SeverityTable table;
  try {
    table.version_ = doc.at("version").get<std::string>();
    for (const auto& [profile, kinds] : doc.at("profiles").items()) {
      for (const auto& [kind, body] : kinds.items()) {
        KindParams kp;
        kp.primary = body.at("primary").get<std::string>();
        kp.increasing = body.at("increasing").get<bool>();
        const auto& levels = body.at("levels");
        if (levels.size() != 5) {
          throw ValidationError("kind \"" + kind + "\" needs 5 levels");
        }
        for (size_t i = 0; i < 5; ++i) {
          for (const auto& [name, value] : levels[i].items()) {
            kp.levels[i].values[name] = value.get<double>();
          }
        }
        table.profiles_[profile][kind] = std::move(kp);
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("severity table schema violation: ") +
                          e.what());
  }
  table.Validate();
  return table;
}

SeverityTable SeverityTable::FromFile(const std::filesystem::path& path) {
  return FromJson(ReadFileText(path));
}

const KindParams& SeverityTable::Get(const std::string& profile,
                                     const std::string& kind) const {
  const auto pit = profiles_.find(profile);
  if (pit == profiles_.end()) {
    throw ValidationError("unknown severity profile \"" + profile + "\"");
  }
  const auto kit = pit->second.find(kind);
  if (kit == pit->second.end()) {
    throw ValidationError("severity profile \"" + profile +
                          "\" lacks kind \"" + kind + "\"");
  }
  return kit->second;
}

const LevelParams& SeverityTable::Level(const std::string& profile,
                                        const std::string& kind,
                                        int severity) const {
  if (severity < 1 || severity > 5) {
    throw ValidationError("severity must lie in [1,5], got " +
                          std::to_string(severity));
  }
  return Get(profile, kind).levels[static_cast<size_t>(severity - 1)];
}

std::string SeverityTable::ProfileForGeometry(int width, int height) {
  const int dim = std::max(width, height);
  if (dim <= 28) return "r28";
  if (dim <= 32) return "r32";
  return "r64";
}

void SeverityTable::Validate() const {
  for (const char* profile : {"r28", "r32", "r64"}) {
    const auto pit = profiles_.find(profile);
    if (pit == profiles_.end()) {
      throw ValidationError(std::string("severity table lacks profile \"") +
                            profile + "\"");
    }
    for (const CorruptionKind kind : AllCorruptionKinds()) {
      const std::string name(KindName(kind));
      const auto kit = pit->second.find(name);
      if (kit == pit->second.end()) {
        throw ValidationError("profile \"" + std::string(profile) +
                              "\" lacks kind \"" + name + "\"");
      }
      const KindParams& kp = kit->second;
      double prev = kp.levels[0].Get(kp.primary);
      for (int s = 1; s < 5; ++s) {
        const double cur = kp.levels[static_cast<size_t>(s)].Get(kp.primary);
        const bool ok = kp.increasing ? cur >= prev : cur <= prev;
        if (!ok) {
          throw ValidationError("primary parameter \"" + kp.primary +
                                "\" of kind \"" + name +
                                "\" is not monotone in severity");
        }
        prev = cur;
      }
    }
  }
}

}  // namespace robkit
