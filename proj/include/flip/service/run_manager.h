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

#ifndef FLIP_SERVICE_RUN_MANAGER_H_
#define FLIP_SERVICE_RUN_MANAGER_H_

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "flip/service/run_registry.h"
#include "json.hpp"

namespace flip::service {

// Executes federation runs on background threads and records their events
// in a RunRegistry. Each run is the single writer of its own event log.
class RunManager {
 public:
  explicit RunManager(RunRegistry* registry) : registry_(registry) {}
  ~RunManager();

  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  // Validates and registers a run, then starts it. `requirements` may be null;
  // when present, adherence warnings are emitted after every round.
  absl::StatusOr<std::string> Submit(const nlohmann::json& config,
                                     const nlohmann::json& requirements);

  absl::Status Pause(const std::string& id);
  absl::Status Resume(const std::string& id);
  absl::Status Abort(const std::string& id);

  // Starts pending runs and aborts runs left running or paused by a previous
  // process.
  absl::Status RecoverAfterRestart();

  // Blocks until every started run has finished.
  void JoinAll();

 private:
  struct Control {
    bool abort = false;
  };

  void Start(const std::string& id);
  void Execute(const std::string& id);

  RunRegistry* registry_;
  std::mutex mu_;
  std::condition_variable resumed_;
  std::map<std::string, Control> controls_;
  std::map<std::string, std::thread> threads_;
};

}  // namespace flip::service

#endif  // FLIP_SERVICE_RUN_MANAGER_H_
