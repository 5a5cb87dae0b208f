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

#ifndef FLIP_SERVICE_HTTP_SERVICE_H_
#define FLIP_SERVICE_HTTP_SERVICE_H_

#include <functional>
#include <map>
#include <string>

#include "absl/status/status.h"
#include "flip/practitioner/engine.h"
#include "flip/service/run_manager.h"
#include "flip/service/run_registry.h"
#include "httplib.h"

namespace flip::service {

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Maps a status onto an HTTP code and a JSON error body
// {"error": {"code": ..., "message": ...}}.
HttpResult ErrorResult(const absl::Status& status);

// Endpoint handlers over a registry and run manager. Handlers are plain
// functions of their inputs so they can be exercised without a socket;
// Mount() wires them to an httplib server.
class FlipService {
 public:
  FlipService(RunRegistry* registry, RunManager* runs,
              practitioner::GoalPolicyTable table)
      : registry_(registry), runs_(runs), table_(table) {}

  HttpResult Calibrate(const std::string& body) const;
  HttpResult Partitions(const std::multimap<std::string, std::string>& params)
      const;
  HttpResult Recommend(const std::string& body);
  HttpResult CreateRun(const std::string& body);
  HttpResult ListRuns() const;
  HttpResult GetRun(const std::string& id) const;
  // Round events as line-delimited JSON, starting at round index `from`.
  HttpResult Rounds(const std::string& id, int64_t from) const;
  HttpResult Control(const std::string& id, const std::string& action);
  HttpResult Warnings(const std::string& id) const;

  void Mount(httplib::Server& server);

 private:
  RunRegistry* registry_;
  RunManager* runs_;
  practitioner::GoalPolicyTable table_;
};

struct ServeOptions {
  std::string address = "127.0.0.1:8080";  // host:port; port 0 picks one
  std::string store_path = "flip-store";
  std::string policy_table_path;  // empty: built-in defaults
  // Called with the bound port once the server accepts connections.
  std::function<void(int)> on_ready;
};

// Opens the store, recovers interrupted runs and serves until stopped.
absl::Status Serve(const ServeOptions& options);

}  // namespace flip::service

#endif  // FLIP_SERVICE_HTTP_SERVICE_H_
