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

#include "flip/service/http_service.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/status.h"
#include "flip/fl/serialization.h"
#include "flip/partition/partitioner.h"
#include "flip/service/requests.h"

namespace flip::service {
namespace {

using nlohmann::json;

HttpResult JsonResult(const json& j, int status = 200) {
  return {status, j.dump() + "\n", "application/json"};
}

absl::StatusOr<json> ParseBody(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("request body is not valid JSON");
  }
  return j;
}

std::string CodeName(absl::StatusCode code) {
  return absl::StatusCodeToString(code);
}

int HttpCode(const absl::Status& status) {
  if (IsCalibrationFailure(status)) return 422;
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
      return 409;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

void Send(httplib::Response& res, const HttpResult& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

HttpResult ErrorResult(const absl::Status& status) {
  std::string kind = CodeName(status.code());
  if (IsCalibrationFailure(status)) kind = "calibration_failure";
  if (IsNumericalFailure(status)) kind = "numerical_failure";
  if (IsPolicyDegenerate(status)) kind = "policy_degenerate";
  return JsonResult(
      {{"error", {{"code", kind}, {"message", std::string(status.message())}}}},
      HttpCode(status));
}

HttpResult FlipService::Calibrate(const std::string& body) const {
  auto j = ParseBody(body);
  if (!j.ok()) return ErrorResult(j.status());
  auto request = CalibrateRequest::FromJson(*j);
  if (!request.ok()) return ErrorResult(request.status());
  auto results = RunCalibrate(*request);
  if (!results.ok()) return ErrorResult(results.status());
  return JsonResult(CalibrateResponse(*request, *results));
}

HttpResult FlipService::Partitions(
    const std::multimap<std::string, std::string>& params) const {
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  int64_t n = 0;
  int k = 0;
  auto n_str = get("n");
  auto k_str = get("k");
  if (!n_str || !k_str || !absl::SimpleAtoi(*n_str, &n) ||
      !absl::SimpleAtoi(*k_str, &k)) {
    return ErrorResult(absl::InvalidArgumentError(
        "query parameters n and k are required integers"));
  }
  auto policy = partition::ParsePolicy(get("policy").value_or("iid"));
  if (!policy.ok()) return ErrorResult(policy.status());
  auto sizes = partition::PartitionSizes(n, k, *policy);
  if (!sizes.ok()) return ErrorResult(sizes.status());
  return JsonResult({{"n", n},
                     {"k", k},
                     {"policy", partition::PolicyName(*policy)},
                     {"sizes", *sizes}});
}

HttpResult FlipService::Recommend(const std::string& body) {
  auto j = ParseBody(body);
  if (!j.ok()) return ErrorResult(j.status());
  auto req = practitioner::RequirementsFromJson(*j);
  if (!req.ok()) return ErrorResult(req.status());
  auto rec = practitioner::Recommend(*req, table_);
  json audit = {{"inputs", practitioner::RequirementsToJson(*req)},
                {"policy_table", table_.ToJson()}};
  if (rec.ok()) {
    audit["recommendation"] = practitioner::RecommendationToJson(*rec);
  } else {
    audit["error"] = std::string(rec.status().message());
  }
  {
    std::ofstream out(
        std::filesystem::path(registry_->store_path()) / "audit.jsonl",
        std::ios::app);
    out << audit.dump() << "\n";
  }
  if (!rec.ok()) return ErrorResult(rec.status());
  return JsonResult(practitioner::RecommendationToJson(*rec));
}

HttpResult FlipService::CreateRun(const std::string& body) {
  auto j = ParseBody(body);
  if (!j.ok()) return ErrorResult(j.status());
  if (!j->is_object() || !j->contains("config")) {
    return ErrorResult(absl::InvalidArgumentError(
        "expected {\"config\": {...}, \"requirements\": {...}?}"));
  }
  for (const auto& item : j->items()) {
    if (item.key() != "config" && item.key() != "requirements") {
      return ErrorResult(absl::InvalidArgumentError(
          absl::StrCat("unknown key '", item.key(), "'")));
    }
  }
  auto id = runs_->Submit(j->at("config"), j->value("requirements", json()));
  if (!id.ok()) return ErrorResult(id.status());
  auto snap = registry_->Get(*id);
  if (!snap.ok()) return ErrorResult(snap.status());
  return JsonResult({{"id", *id}, {"status", RunStatusName(snap->status)}},
                    201);
}

HttpResult FlipService::ListRuns() const {
  json runs = json::array();
  for (const auto& s : registry_->List()) {
    runs.push_back({{"id", s.id},
                    {"status", RunStatusName(s.status)},
                    {"rounds_completed", s.rounds_completed},
                    {"diagnostic", s.diagnostic}});
  }
  return JsonResult({{"runs", runs}});
}

HttpResult FlipService::GetRun(const std::string& id) const {
  auto snap = registry_->Get(id);
  if (!snap.ok()) return ErrorResult(snap.status());
  return JsonResult(snap->ToJson());
}

HttpResult FlipService::Rounds(const std::string& id, int64_t from) const {
  auto rounds = registry_->Events(id, 0, "round_complete");
  if (!rounds.ok()) return ErrorResult(rounds.status());
  std::string body;
  for (int64_t i = std::max<int64_t>(0, from);
       i < static_cast<int64_t>(rounds->size()); ++i) {
    body += (*rounds)[i].dump() + "\n";
  }
  return {200, body, "application/x-ndjson"};
}

HttpResult FlipService::Control(const std::string& id,
                                const std::string& action) {
  absl::Status st;
  if (action == "pause") {
    st = runs_->Pause(id);
  } else if (action == "resume") {
    st = runs_->Resume(id);
  } else if (action == "abort") {
    st = runs_->Abort(id);
  } else {
    st = absl::InvalidArgumentError(absl::StrCat("unknown action ", action));
  }
  if (!st.ok()) return ErrorResult(st);
  auto snap = registry_->Get(id);
  if (!snap.ok()) return ErrorResult(snap.status());
  return JsonResult({{"id", id}, {"status", RunStatusName(snap->status)}});
}

HttpResult FlipService::Warnings(const std::string& id) const {
  auto warnings = registry_->Events(id, 0, "warning");
  if (!warnings.ok()) return ErrorResult(warnings.status());
  return JsonResult({{"id", id}, {"warnings", *warnings}});
}

void FlipService::Mount(httplib::Server& server) {
  server.Post("/calibrate",
              [this](const httplib::Request& req, httplib::Response& res) {
                Send(res, Calibrate(req.body));
              });
  server.Get("/partitions",
             [this](const httplib::Request& req, httplib::Response& res) {
               Send(res, Partitions(req.params));
             });
  server.Post("/recommend",
              [this](const httplib::Request& req, httplib::Response& res) {
                Send(res, Recommend(req.body));
              });
  server.Post("/runs",
              [this](const httplib::Request& req, httplib::Response& res) {
                Send(res, CreateRun(req.body));
              });
  server.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
    Send(res, ListRuns());
  });
  server.Get(R"(/runs/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               Send(res, GetRun(req.matches[1]));
             });
  server.Get(R"(/runs/([^/]+)/warnings)",
             [this](const httplib::Request& req, httplib::Response& res) {
               Send(res, Warnings(req.matches[1]));
             });
  server.Post(R"(/runs/([^/]+)/(pause|resume|abort))",
              [this](const httplib::Request& req, httplib::Response& res) {
                Send(res, Control(req.matches[1], req.matches[2]));
              });
  server.Get(
      R"(/runs/([^/]+)/rounds)",
      [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        int64_t from = 0;
        if (req.has_param("from") &&
            !absl::SimpleAtoi(req.get_param_value("from"), &from)) {
          Send(res, ErrorResult(absl::InvalidArgumentError(
                        "from must be an integer")));
          return;
        }
        const bool follow = req.has_param("follow") &&
                            req.get_param_value("follow") != "0";
        if (!follow) {
          Send(res, Rounds(id, from));
          return;
        }
        if (auto snap = registry_->Get(id); !snap.ok()) {
          Send(res, ErrorResult(snap.status()));
          return;
        }
        // Streams round events as they arrive until the run finishes.
        auto sent = std::make_shared<int64_t>(std::max<int64_t>(0, from));
        res.set_chunked_content_provider(
            "application/x-ndjson",
            [this, id, sent](size_t, httplib::DataSink& sink) {
              for (;;) {
                auto rounds = registry_->Events(id, 0, "round_complete");
                auto snap = registry_->Get(id);
                if (!rounds.ok() || !snap.ok()) return false;
                for (; *sent < static_cast<int64_t>(rounds->size()); ++*sent) {
                  const std::string line = (*rounds)[*sent].dump() + "\n";
                  if (!sink.write(line.data(), line.size())) return false;
                }
                if (IsTerminal(snap->status)) {
                  sink.done();
                  return true;
                }
                if (!sink.is_writable()) return false;
                const int64_t total = snap->event_count;
                registry_->WaitForEvents(id, total, std::chrono::seconds(1))
                    .IgnoreError();
              }
            });
      });
}

absl::Status Serve(const ServeOptions& options) {
  const auto colon = options.address.rfind(':');
  int port = 0;
  if (colon == std::string::npos ||
      !absl::SimpleAtoi(options.address.substr(colon + 1), &port)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "address '", options.address, "' is not of the form host:port"));
  }
  const std::string host = options.address.substr(0, colon);

  practitioner::GoalPolicyTable table;
  if (!options.policy_table_path.empty()) {
    ASSIGN_OR_RETURN(table,
                     practitioner::GoalPolicyTable::Load(
                         options.policy_table_path));
  }
  ASSIGN_OR_RETURN(std::unique_ptr<RunRegistry> registry,
                   RunRegistry::Open(options.store_path));
  RunManager runs(registry.get());
  RETURN_IF_ERROR(runs.RecoverAfterRestart());
  FlipService service(registry.get(), &runs, table);

  httplib::Server server;
  // SO_REUSEADDR only: the default SO_REUSEPORT lets a second server share a
  // busy port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  service.Mount(server);
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    return absl::UnavailableError(
        absl::StrCat("cannot bind ", options.address, " (port busy?)"));
  }
  if (options.on_ready) options.on_ready(bound);
  if (!server.listen_after_bind()) {
    return absl::UnavailableError("server stopped unexpectedly");
  }
  return absl::OkStatus();
}

}  // namespace flip::service
