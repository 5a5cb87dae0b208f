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

#ifndef FLIP_SERVICE_RUN_REGISTRY_H_
#define FLIP_SERVICE_RUN_REGISTRY_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace flip::service {

enum class RunStatus { kPending, kRunning, kPaused, kDone, kAborted };

std::string RunStatusName(RunStatus status);
absl::StatusOr<RunStatus> ParseRunStatus(const std::string& name);
bool IsTerminal(RunStatus status);
// Pending -> Running; Running <-> Paused; Running -> Done; Running or
// Paused -> Aborted.
bool IsValidTransition(RunStatus from, RunStatus to);

struct RunSnapshot {
  std::string id;
  RunStatus status = RunStatus::kPending;
  nlohmann::json config;
  nlohmann::json requirements;  // null when none were given
  std::string diagnostic;
  int64_t event_count = 0;
  int64_t rounds_completed = 0;

  nlohmann::json ToJson() const;
};

// Run id -> {config, status, event stream}, persisted under a store
// directory as runs/<id>/snapshot.json (rewritten atomically on every status
// change) and runs/<id>/events.jsonl (append-only). Thread-safe.
class RunRegistry {
 public:
  // Creates the store if needed and loads every persisted run. A snapshot
  // that does not parse is a startup failure.
  static absl::StatusOr<std::unique_ptr<RunRegistry>> Open(
      const std::string& store_path);

  const std::string& store_path() const { return store_path_; }

  absl::StatusOr<std::string> Create(const nlohmann::json& config,
                                     const nlohmann::json& requirements);
  absl::Status Transition(const std::string& id, RunStatus to,
                          const std::string& diagnostic = "");
  absl::Status AppendEvent(const std::string& id, const nlohmann::json& event);

  absl::StatusOr<RunSnapshot> Get(const std::string& id) const;
  std::vector<RunSnapshot> List() const;
  // Events with index >= from, optionally only of one kind.
  absl::StatusOr<std::vector<nlohmann::json>> Events(
      const std::string& id, int64_t from = 0,
      const std::string& kind = "") const;
  // Blocks until the run has more than `from` events, reaches a terminal
  // status, or the timeout passes. Returns the current event count.
  absl::StatusOr<int64_t> WaitForEvents(const std::string& id, int64_t from,
                                        std::chrono::milliseconds timeout);

  // Entire registry state, for persistence checks.
  nlohmann::json StateJson() const;

 private:
  struct Entry {
    RunSnapshot snapshot;
    std::vector<nlohmann::json> events;
  };

  explicit RunRegistry(std::string store_path)
      : store_path_(std::move(store_path)) {}

  absl::Status Load();
  std::string RunDir(const std::string& id) const;
  absl::Status WriteSnapshot(const Entry& entry) const;

  std::string store_path_;
  mutable std::mutex mu_;
  std::condition_variable changed_;
  std::map<std::string, Entry> runs_;
  int64_t next_id_ = 1;
};

}  // namespace flip::service

#endif  // FLIP_SERVICE_RUN_REGISTRY_H_
