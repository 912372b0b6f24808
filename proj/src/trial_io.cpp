// Copyright (c) 2026 fdbench contributors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>

#include "fdb/harness.hpp"

namespace fdb {

nlohmann::json trial_to_json(const TrialRecord& trial) {
  nlohmann::json j{{"identity_id", trial.identity_id},
                   {"probe_image_id", trial.probe_image_id},
                   {"reference_image_id", trial.reference_image_id},
                   {"condition", condition_label(trial.condition)},
                   {"spec", spec_to_json(trial.spec)},
                   {"similarity", trial.similarity},
                   {"accepted", trial.accepted},
                   {"correct", trial.correct},
                   {"condition_key", trial.condition_key()}};
  if (trial.predicted_identity.has_value()) {
    j["predicted_identity"] = *trial.predicted_identity;
  } else {
    j["predicted_identity"] = nullptr;
  }
  if (trial.error.has_value()) j["error"] = *trial.error;
  return j;
}

TrialRecord trial_from_json(const nlohmann::json& j) {
  TrialRecord t;
  try {
    t.identity_id = j.at("identity_id").get<std::string>();
    t.probe_image_id = j.at("probe_image_id").get<std::string>();
    t.reference_image_id = j.at("reference_image_id").get<std::string>();
    t.condition = condition_from_label(j.at("condition").get<std::string>());
    t.spec = spec_from_json(j.at("spec"));
    t.similarity = j.at("similarity").get<double>();
    if (!j.at("predicted_identity").is_null()) {
      t.predicted_identity = j.at("predicted_identity").get<std::string>();
    }
    t.accepted = j.at("accepted").get<bool>();
    t.correct = j.at("correct").get<bool>();
    if (j.contains("error")) t.error = j.at("error").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed trial record: ") + e.what());
  }
  if (t.correct && !(t.accepted && t.predicted_identity == t.identity_id)) {
    throw ValidationError("inconsistent trial record for " +
                          t.condition_key());
  }
  return t;
}

std::vector<TrialRecord> read_trials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trials file " + path.string());
  std::vector<TrialRecord> trials;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("trials line " + std::to_string(lineno) +
                            " is not JSON: " + e.what());
    }
    trials.push_back(trial_from_json(j));
  }
  return trials;
}

}  // namespace fdb
