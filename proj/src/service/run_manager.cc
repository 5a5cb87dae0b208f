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

#include "flip/service/run_manager.h"

#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "flip/common/status.h"
#include "flip/fl/federation.h"
#include "flip/fl/serialization.h"
#include "flip/practitioner/engine.h"

namespace flip::service {
namespace {

using nlohmann::json;

}  // namespace

RunManager::~RunManager() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [id, control] : controls_) control.abort = true;
  }
  resumed_.notify_all();
  JoinAll();
}

absl::StatusOr<std::string> RunManager::Submit(const json& config,
                                               const json& requirements) {
  ASSIGN_OR_RETURN(fl::FederationConfig parsed, fl::ConfigFromJson(config));
  if (!requirements.is_null()) {
    auto req = practitioner::RequirementsFromJson(requirements);
    if (!req.ok()) return req.status();
  }
  ASSIGN_OR_RETURN(std::string id,
                   registry_->Create(fl::ConfigToJson(parsed), requirements));
  Start(id);
  return id;
}

void RunManager::Start(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  controls_[id] = Control{};
  threads_[id] = std::thread([this, id] { Execute(id); });
}

absl::Status RunManager::Pause(const std::string& id) {
  return registry_->Transition(id, RunStatus::kPaused);
}

absl::Status RunManager::Resume(const std::string& id) {
  RETURN_IF_ERROR(registry_->Transition(id, RunStatus::kRunning));
  resumed_.notify_all();
  return absl::OkStatus();
}

absl::Status RunManager::Abort(const std::string& id) {
  ASSIGN_OR_RETURN(RunSnapshot snap, registry_->Get(id));
  if (IsTerminal(snap.status)) {
    return absl::FailedPreconditionError(
        absl::StrCat("run ", id, " already ", RunStatusName(snap.status)));
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = controls_.find(id);
    if (it == controls_.end()) {
      return absl::FailedPreconditionError(
          absl::StrCat("run ", id, " is not executing in this process"));
    }
    it->second.abort = true;
  }
  resumed_.notify_all();
  return absl::OkStatus();
}

absl::Status RunManager::RecoverAfterRestart() {
  for (const RunSnapshot& snap : registry_->List()) {
    if (snap.status == RunStatus::kPending) {
      Start(snap.id);
    } else if (snap.status == RunStatus::kRunning ||
               snap.status == RunStatus::kPaused) {
      RETURN_IF_ERROR(registry_->AppendEvent(
          snap.id, {{"event", "aborted"},
                    {"diagnostic", "interrupted by service restart"}}));
      RETURN_IF_ERROR(registry_->Transition(snap.id, RunStatus::kAborted,
                                            "interrupted by service restart"));
    }
  }
  return absl::OkStatus();
}

void RunManager::JoinAll() {
  std::map<std::string, std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(mu_);
    threads.swap(threads_);
  }
  for (auto& [id, t] : threads) {
    if (t.joinable()) t.join();
  }
}

void RunManager::Execute(const std::string& id) {
  auto fail = [&](const std::string& diagnostic) {
    registry_->AppendEvent(
        id, {{"event", "aborted"}, {"diagnostic", diagnostic}}).IgnoreError();
    registry_->Transition(id, RunStatus::kAborted, diagnostic).IgnoreError();
  };

  if (!registry_->Transition(id, RunStatus::kRunning).ok()) return;
  auto snap = registry_->Get(id);
  if (!snap.ok()) return;
  auto config = fl::ConfigFromJson(snap->config);
  if (!config.ok()) {
    fail(std::string(config.status().message()));
    return;
  }
  std::optional<practitioner::Requirements> requirements;
  if (!snap->requirements.is_null()) {
    auto req = practitioner::RequirementsFromJson(snap->requirements);
    if (!req.ok()) {
      fail(std::string(req.status().message()));
      return;
    }
    requirements = *req;
  }

  const fl::FederationData data =
      fl::MakeFederationData(config->data, config->seed);
  fl::RunRecord partial;
  size_t warnings_sent = 0;
  bool aborted_by_request = false;

  auto observer = [&](const fl::RoundMetrics& round) {
    json event = fl::RoundToJson(round);
    event["event"] = "round_complete";
    registry_->AppendEvent(id, event).IgnoreError();
    partial.rounds.push_back(round);
    if (requirements.has_value()) {
      auto warnings = practitioner::CheckAdherence(partial, *requirements);
      for (; warnings_sent < warnings.size(); ++warnings_sent) {
        json w = practitioner::AdherenceEventToJson(warnings[warnings_sent]);
        w["event"] = "warning";
        registry_->AppendEvent(id, w).IgnoreError();
      }
    }
    // Block while paused; an abort request wakes the wait.
    std::unique_lock<std::mutex> lock(mu_);
    for (;;) {
      if (controls_[id].abort) {
        aborted_by_request = true;
        return fl::ObserverAction::kAbort;
      }
      auto now = registry_->Get(id);
      if (!now.ok() || now->status != RunStatus::kPaused) break;
      resumed_.wait_for(lock, std::chrono::milliseconds(200));
    }
    return fl::ObserverAction::kContinue;
  };

  auto record = fl::RunFederation(*config, data, observer);
  if (!record.ok()) {
    if (IsCalibrationFailure(record.status())) {
      json w = practitioner::AdherenceEventToJson(
          practitioner::CalibrationFailureEvent(record.status()));
      w["event"] = "warning";
      registry_->AppendEvent(id, w).IgnoreError();
    }
    fail(std::string(record.status().message()));
    return;
  }
  if (record->aborted) {
    fail(aborted_by_request ? "aborted by request" : record->diagnostic);
    return;
  }
  registry_->AppendEvent(id, {{"event", "done"},
                              {"max_accuracy", record->MaxAccuracy()},
                              {"final_parameters", record->final_parameters}})
      .IgnoreError();
  // A pause requested during the final round is released by completion.
  if (auto now = registry_->Get(id); now.ok() &&
                                     now->status == RunStatus::kPaused) {
    registry_->Transition(id, RunStatus::kRunning).IgnoreError();
  }
  registry_->Transition(id, RunStatus::kDone).IgnoreError();
}

}  // namespace flip::service
