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

#ifndef ROBKIT_METRICS_H_
#define ROBKIT_METRICS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robkit/manifest.h"
#include "robkit/predictions.h"

namespace robkit {

// 100 * (1 - correct/N) at full precision; preds must cover the manifest
// exactly once.
double CleanError(const DatasetManifest& manifest, const PredictionSet& preds);

// Complete rectangular error grid; built trees always span severities 1..5.
struct CorruptionErrorMatrix {
  std::vector<std::string> kinds;
  std::vector<int> severities;
  std::vector<std::vector<double>> errors;  // [kind][severity], percent

  void Validate() const;
  double At(size_t kind_idx, size_t sev_idx) const {
    return errors[kind_idx][sev_idx];
  }
};

CorruptionErrorMatrix BuildErrorMatrix(
    const std::vector<std::string>& kinds, const std::vector<int>& severities,
    const std::map<std::pair<std::string, int>,
                   std::pair<const DatasetManifest*, const PredictionSet*>>&
        cells);

// Plain mCE: unweighted mean over every (kind, severity) entry.
double Mce(const CorruptionErrorMatrix& matrix);

// Hendrycks-style ratio: mean over kinds of sum_s E / sum_s E_baseline.
double NormalizedMce(const CorruptionErrorMatrix& matrix,
                     const CorruptionErrorMatrix& baseline);

struct EvalReport {
  std::string model_id;
  std::string dataset_id;
  std::string profile;
  double clean_error = 0.0;
  CorruptionErrorMatrix matrix;  // may be empty (no corrupted evaluation)
  std::optional<double> mce;
  std::optional<double> normalized_mce;

  void Validate() const;
};

std::string EvalReportToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const std::string& text);
EvalReport LoadEvalReport(const std::filesystem::path& path);
void SaveEvalReport(const EvalReport& report,
                    const std::filesystem::path& path);
std::string EvalReportToCsv(const EvalReport& report);

struct DeltaRow {
  std::string metric;
  double before = 0.0;
  double after = 0.0;
  double delta = 0.0;       // after - before, full precision
  std::string display;      // one decimal, signed ("-6.2", "+1.2", "±0.0")
  bool improved = false;    // error metrics improve when delta < 0
};

// Signed one-decimal display, half away from zero.
std::string FormatSignedDelta(double delta);

std::vector<DeltaRow> DeltaReport(const EvalReport& before,
                                  const EvalReport& after);

CorruptionErrorMatrix LoadMatrixCsv(const std::filesystem::path& path);
void SaveMatrixCsv(const CorruptionErrorMatrix& matrix,
                   const std::filesystem::path& path);

}  // namespace robkit

#endif  // ROBKIT_METRICS_H_
