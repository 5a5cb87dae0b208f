// Copyright 2026 The FLIP Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLIP_FL_SERIALIZATION_H_
#define FLIP_FL_SERIALIZATION_H_

#include <string>

#include "absl/status/statusor.h"
#include "flip/accountant/calibration.h"
#include "flip/fl/federation.h"
#include "json.hpp"

namespace flip::fl {

std::string AccountingName(accountant::AccountingConvention convention);
absl::StatusOr<accountant::AccountingConvention> ParseAccounting(
    const std::string& name);

// Configs are JSON objects mirroring FederationConfig. Absent keys keep their
// defaults, unknown keys are rejected, and model dim/classes default to the
// data section. The round filter is not serialized.
nlohmann::json ConfigToJson(const FederationConfig& config);
absl::StatusOr<FederationConfig> ConfigFromJson(const nlohmann::json& j);
// NotFound when the file is missing, InvalidArgument when it does not parse.
absl::StatusOr<FederationConfig> LoadConfigFile(const std::string& path);

nlohmann::json ClientSetupToJson(const ClientSetup& setup);
absl::StatusOr<ClientSetup> ClientSetupFromJson(const nlohmann::json& j);
nlohmann::json RoundToJson(const RoundMetrics& round);
absl::StatusOr<RoundMetrics> RoundFromJson(const nlohmann::json& j);

// Line-delimited events: one "setup", one "round_complete" per round, then
// "done" or "aborted". Infinite epsilon is written as null.
std::string RunRecordToJsonl(const RunRecord& record);
absl::StatusOr<RunRecord> RunRecordFromJsonl(const std::string& text);

// Columns: round, accuracy, loss, eps_client_<i>..., mem_peak_client_<i>...
std::string SummaryCsv(const RunRecord& record);

}  // namespace flip::fl

#endif  // FLIP_FL_SERIALIZATION_H_
