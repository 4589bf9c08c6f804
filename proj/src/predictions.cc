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

#include "robkit/predictions.h"

#include <sstream>
#include <vector>

#include "robkit/error.h"
#include "robkit/io_util.h"

namespace robkit {

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

PredictionSet LoadPredictions(const std::filesystem::path& path) {
  std::istringstream in(ReadFileText(path));
  std::string header;
  if (!std::getline(in, header)) {
    throw ValidationError("prediction file is empty: " + path.string());
  }
  const auto head = SplitCsvLine(header);
  const bool hard =
      head.size() >= 3 && head[0] == "item_id" && head[1] == "label" &&
      head[2] == "pred";
  const bool logits = !hard && head.size() >= 2 && head[0] == "item_id" &&
                      head[1].size() >= 2 && head[1][0] == 'v';
  if (!hard && !logits) {
    throw ValidationError(
        "prediction file header must be `item_id,label,pred` or "
        "`item_id,v0,...`: " +
        path.string());
  }

  PredictionSet preds;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    const std::string where =
        path.filename().string() + ":" + std::to_string(line_no);
    if (fields.size() < 2) {
      throw ValidationError("short prediction row at " + where);
    }
    PredictionRecord rec;
    try {
      if (hard) {
        if (fields.size() < 3) {
          throw ValidationError("short prediction row at " + where);
        }
        rec.label_in_file = std::stoi(fields[1]);
        rec.predicted = std::stoi(fields[2]);
        if (fields.size() >= 4 && !fields[3].empty()) {
          rec.confidence = std::stod(fields[3]);
        }
      } else {
        // Argmax with lowest-index tie-breaking.
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (size_t i = 1; i < fields.size(); ++i) {
          const double v = std::stod(fields[i]);
          if (v > best) {
            best = v;
            best_idx = static_cast<int>(i - 1);
          }
        }
        rec.predicted = best_idx;
      }
    } catch (const std::invalid_argument&) {
      throw ValidationError("malformed number in prediction row at " + where);
    } catch (const std::out_of_range&) {
      throw ValidationError("out-of-range number in prediction row at " +
                            where);
    }
    if (!preds.records.emplace(fields[0], rec).second) {
      throw ValidationError("duplicate prediction for item \"" + fields[0] +
                            "\" at " + where);
    }
  }
  return preds;
}

void SavePredictionsCsv(const PredictionSet& preds,
                        const std::filesystem::path& path) {
  std::string out = "item_id,label,pred\n";
  for (const auto& [id, rec] : preds.records) {
    out += id;
    out += ',';
    out += std::to_string(rec.label_in_file.value_or(-1));
    out += ',';
    out += std::to_string(rec.predicted);
    out += '\n';
  }
  AtomicWriteText(path, out);
}

}  // namespace robkit
