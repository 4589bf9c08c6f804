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

#include "robkit/metrics.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "robkit/error.h"
#include "robkit/io_util.h"

namespace robkit {

using nlohmann::json;

double CleanError(const DatasetManifest& manifest,
                  const PredictionSet& preds) {
  if (manifest.items.empty()) {
    throw ValidationError("clean error needs at least one item");
  }
  if (preds.size() != manifest.items.size()) {
    throw ValidationError(
        "prediction coverage mismatch: " + std::to_string(preds.size()) +
        " predictions for " + std::to_string(manifest.items.size()) +
        " items");
  }
  size_t correct = 0;
  for (const auto& item : manifest.items) {
    const auto it = preds.records.find(item.id);
    if (it == preds.records.end()) {
      throw ValidationError("missing prediction for item \"" + item.id + "\"");
    }
    if (it->second.predicted == item.label) ++correct;
  }
  return 100.0 *
         (1.0 - static_cast<double>(correct) / manifest.items.size());
}

void CorruptionErrorMatrix::Validate() const {
  if (kinds.empty() || severities.empty()) {
    throw ValidationError("error matrix must not be empty");
  }
  if (errors.size() != kinds.size()) {
    throw ValidationError("error matrix row count does not match kinds");
  }
  for (const auto& row : errors) {
    if (row.size() != severities.size()) {
      throw ValidationError("error matrix has an incomplete severity row");
    }
    for (const double e : row) {
      if (!(e >= 0.0 && e <= 100.0)) {
        throw ValidationError("error matrix entry outside [0,100]");
      }
    }
  }
}

CorruptionErrorMatrix BuildErrorMatrix(
    const std::vector<std::string>& kinds, const std::vector<int>& severities,
    const std::map<std::pair<std::string, int>,
                   std::pair<const DatasetManifest*, const PredictionSet*>>&
        cells) {
  CorruptionErrorMatrix matrix;
  matrix.kinds = kinds;
  matrix.severities = severities;
  matrix.errors.assign(kinds.size(),
                       std::vector<double>(severities.size(), 0.0));
  for (size_t k = 0; k < kinds.size(); ++k) {
    for (size_t s = 0; s < severities.size(); ++s) {
      const auto it = cells.find({kinds[k], severities[s]});
      if (it == cells.end()) {
        throw ValidationError("missing matrix cell (" + kinds[k] + ", " +
                              std::to_string(severities[s]) + ")");
      }
      try {
        matrix.errors[k][s] = CleanError(*it->second.first, *it->second.second);
      } catch (const ValidationError& e) {
        throw ValidationError("cell (" + kinds[k] + ", " +
                              std::to_string(severities[s]) +
                              "): " + e.what());
      }
    }
  }
  matrix.Validate();
  return matrix;
}

double Mce(const CorruptionErrorMatrix& matrix) {
  matrix.Validate();
  double sum = 0.0;
  size_t n = 0;
  for (const auto& row : matrix.errors) {
    for (const double e : row) {
      sum += e;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

double NormalizedMce(const CorruptionErrorMatrix& matrix,
                     const CorruptionErrorMatrix& baseline) {
  matrix.Validate();
  baseline.Validate();
  if (matrix.kinds != baseline.kinds ||
      matrix.severities != baseline.severities) {
    throw ValidationError(
        "baseline matrix grid does not match the evaluated matrix");
  }
  double acc = 0.0;
  for (size_t k = 0; k < matrix.kinds.size(); ++k) {
    double num = 0.0, den = 0.0;
    for (size_t s = 0; s < matrix.severities.size(); ++s) {
      num += matrix.errors[k][s];
      den += baseline.errors[k][s];
    }
    if (den <= 0.0) {
      throw ValidationError("baseline row for kind \"" + matrix.kinds[k] +
                            "\" sums to zero");
    }
    acc += num / den;
  }
  return acc / static_cast<double>(matrix.kinds.size());
}

void EvalReport::Validate() const {
  if (!(clean_error >= 0.0 && clean_error <= 100.0)) {
    throw ValidationError("clean error outside [0,100]");
  }
  if (!matrix.kinds.empty()) {
    matrix.Validate();
    if (!mce.has_value()) {
      throw ValidationError("report has a matrix but no mCE");
    }
    const double recomputed = Mce(matrix);
    if (std::fabs(recomputed - *mce) > 1e-9) {
      throw ValidationError("stored mCE does not equal the matrix mean");
    }
  }
}

std::string EvalReportToJson(const EvalReport& report) {
  json doc;
  doc["model"] = report.model_id;
  doc["dataset"] = report.dataset_id;
  doc["profile"] = report.profile;
  doc["clean_error"] = report.clean_error;
  json kinds = json::array();
  json rows = json::object();
  for (size_t k = 0; k < report.matrix.kinds.size(); ++k) {
    kinds.push_back(report.matrix.kinds[k]);
    rows[report.matrix.kinds[k]] = report.matrix.errors[k];
  }
  doc["kinds"] = std::move(kinds);
  doc["severities"] = report.matrix.severities;
  doc["matrix"] = std::move(rows);
  doc["mce"] = report.mce.has_value() ? json(*report.mce) : json(nullptr);
  doc["normalized_mce"] = report.normalized_mce.has_value()
                              ? json(*report.normalized_mce)
                              : json(nullptr);
  return doc.dump(2) + "\n";
}

EvalReport EvalReportFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report parse failure: ") + e.what());
  }
  EvalReport report;
  try {
    report.model_id = doc.at("model").get<std::string>();
    report.dataset_id = doc.at("dataset").get<std::string>();
    report.profile = doc.value("profile", std::string());
    report.clean_error = doc.at("clean_error").get<double>();
    for (const auto& k : doc.at("kinds")) {
      report.matrix.kinds.push_back(k.get<std::string>());
    }
    for (const auto& s : doc.at("severities")) {
      report.matrix.severities.push_back(s.get<int>());
    }
    for (const auto& kind : report.matrix.kinds) {
      report.matrix.errors.push_back(
          doc.at("matrix").at(kind).get<std::vector<double>>());
    }
    if (!doc.at("mce").is_null()) {
      report.mce = doc.at("mce").get<double>();
    }
    if (!doc.at("normalized_mce").is_null()) {
      report.normalized_mce = doc.at("normalized_mce").get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report schema violation: ") + e.what());
  }
  report.Validate();
  return report;
}

EvalReport LoadEvalReport(const std::filesystem::path& path) {
  return EvalReportFromJson(ReadFileText(path));
}

void SaveEvalReport(const EvalReport& report,
                    const std::filesystem::path& path) {
  report.Validate();
  AtomicWriteText(path, EvalReportToJson(report));
}

std::string EvalReportToCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "metric,kind,severity,value\n";
  out << "clean_error,,," << report.clean_error << "\n";
  for (size_t k = 0; k < report.matrix.kinds.size(); ++k) {
    for (size_t s = 0; s < report.matrix.severities.size(); ++s) {
      out << "error," << report.matrix.kinds[k] << ","
          << report.matrix.severities[s] << "," << report.matrix.errors[k][s]
          << "\n";
    }
  }
  if (report.mce.has_value()) out << "mce,,," << *report.mce << "\n";
  if (report.normalized_mce.has_value()) {
    out << "normalized_mce,,," << *report.normalized_mce << "\n";
  }
  return out.str();
}

std::string FormatSignedDelta(double delta) {
  // Display rounds half away from zero to one decimal; stored values stay
  // full precision.
  const double scaled = std::round(std::fabs(delta) * 10.0);
  const double rounded = scaled / 10.0;
  char buf[32];
  if (rounded == 0.0) {
    return "±0.0";
  }
  std::snprintf(buf, sizeof(buf), "%c%.1f", delta < 0 ? '-' : '+', rounded);
  return buf;
}

std::vector<DeltaRow> DeltaReport(const EvalReport& before,
                                  const EvalReport& after) {
  if (before.dataset_id != after.dataset_id ||
      before.profile != after.profile) {
    throw ValidationError("reports compare different datasets or profiles");
  }
  if (before.mce.has_value() != after.mce.has_value() ||
      before.normalized_mce.has_value() != after.normalized_mce.has_value()) {
    throw ValidationError("reports carry different metric sets");
  }
  auto make_row = [](const std::string& metric, double b, double a) {
    DeltaRow row;
    row.metric = metric;
    row.before = b;
    row.after = a;
    row.delta = a - b;
    row.display = FormatSignedDelta(row.delta);
    row.improved = row.delta < 0.0;  // error metrics: lower is better
    return row;
  };
  std::vector<DeltaRow> rows;
  rows.push_back(make_row("clean_error", before.clean_error, after.clean_error));
  if (before.mce.has_value()) {
    rows.push_back(make_row("mce", *before.mce, *after.mce));
  }
  if (before.normalized_mce.has_value()) {
    rows.push_back(make_row("normalized_mce", *before.normalized_mce,
                            *after.normalized_mce));
  }
  return rows;
}

CorruptionErrorMatrix LoadMatrixCsv(const std::filesystem::path& path) {
  std::istringstream in(ReadFileText(path));
  std::string header;
  if (!std::getline(in, header)) {
    throw ValidationError("matrix csv is empty: " + path.string());
  }
  // header: kind,<severity>,<severity>,...
  CorruptionErrorMatrix matrix;
  {
    std::istringstream hs(header);
    std::string field;
    bool first = true;
    while (std::getline(hs, field, ',')) {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      if (first) {
        if (field != "kind") {
          throw ValidationError("matrix csv header must start with `kind`");
        }
        first = false;
        continue;
      }
      try {
        matrix.severities.push_back(std::stoi(field));
      } catch (const std::exception&) {
        throw ValidationError("bad severity column \"" + field + "\"");
      }
    }
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    matrix.kinds.push_back(field);
    std::vector<double> row;
    while (std::getline(ls, field, ',')) {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ValidationError("bad matrix value \"" + field + "\"");
      }
    }
    matrix.errors.push_back(std::move(row));
  }
  matrix.Validate();
  return matrix;
}

void SaveMatrixCsv(const CorruptionErrorMatrix& matrix,
                   const std::filesystem::path& path) {
  matrix.Validate();
  std::ostringstream out;
  out << "kind";
  for (const int s : matrix.severities) out << "," << s;
  out << "\n";
  out.precision(17);
  for (size_t k = 0; k < matrix.kinds.size(); ++k) {
    out << matrix.kinds[k];
    for (const double e : matrix.errors[k]) out << "," << e;
    out << "\n";
  }
  AtomicWriteText(path, out.str());
}

}  // namespace robkit
