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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "flip/accountant/calibration.h"
#include "flip/service/http_service.h"
#include "flip/service/requests.h"
#include "flip/service/run_manager.h"
#include "flip/service/run_registry.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"

namespace flip::service {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string FreshStore() {
  const auto* info = testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() /
                 (std::string("flip_service_") + info->test_suite_name() +
                  "_" + info->name());
  fs::remove_all(dir);
  return dir.string();
}

json SmallConfig(int rounds = 3) {
  return {{"clients", 2},
          {"rounds", rounds},
          {"batch_size", 100},
          {"seed", 7},
          {"data", {{"train_size", 1000}, {"test_size", 200}}},
          {"privacy", {{"sigmas", {1.0}}}}};
}

// Slow enough that a pause lands between rounds.
json SlowConfig() {
  return {{"clients", 2},
          {"rounds", 200},
          {"batch_size", 500},
          {"seed", 3},
          {"model", {{"architecture", "mlp"}, {"hidden", 64}}},
          {"data", {{"train_size", 20000}, {"test_size", 1000}, {"dim", 50}}},
          {"privacy", {{"enabled", false}}}};
}

template <typename Pred>
bool WaitFor(Pred pred, std::chrono::milliseconds limit =
                            std::chrono::milliseconds(60000)) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return pred();
}

RunStatus StatusOf(const RunRegistry& registry, const std::string& id) {
  auto snap = registry.Get(id);
  return snap.ok() ? snap->status : RunStatus::kAborted;
}

int64_t RoundCount(const RunRegistry& registry, const std::string& id) {
  auto rounds = registry.Events(id, 0, "round_complete");
  return rounds.ok() ? static_cast<int64_t>(rounds->size()) : -1;
}

TEST(RunStatusTest, TransitionTable) {
  using S = RunStatus;
  const std::vector<S> all = {S::kPending, S::kRunning, S::kPaused, S::kDone,
                              S::kAborted};
  int allowed = 0;
  for (S from : all) {
    for (S to : all) allowed += IsValidTransition(from, to) ? 1 : 0;
  }
  EXPECT_EQ(allowed, 6);
  EXPECT_TRUE(IsValidTransition(S::kPending, S::kRunning));
  EXPECT_TRUE(IsValidTransition(S::kRunning, S::kPaused));
  EXPECT_TRUE(IsValidTransition(S::kPaused, S::kRunning));
  EXPECT_TRUE(IsValidTransition(S::kRunning, S::kDone));
  EXPECT_TRUE(IsValidTransition(S::kRunning, S::kAborted));
  EXPECT_TRUE(IsValidTransition(S::kPaused, S::kAborted));
  EXPECT_FALSE(IsValidTransition(S::kPending, S::kDone));
  EXPECT_FALSE(IsValidTransition(S::kPaused, S::kDone));
  EXPECT_FALSE(IsValidTransition(S::kDone, S::kRunning));
  for (S s : all) {
    auto parsed = ParseRunStatus(RunStatusName(s));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, s);
  }
  EXPECT_FALSE(ParseRunStatus("finished").ok());
}

TEST(RunRegistryTest, IdsAreUniqueAndTransitionsEnforced) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok()) << registry.status();
  auto a = (*registry)->Create(SmallConfig(), nullptr);
  auto b = (*registry)->Create(SmallConfig(), nullptr);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_NE(*a, *b);
  EXPECT_EQ((*registry)->Transition(*a, RunStatus::kDone).code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE((*registry)->Transition(*a, RunStatus::kRunning).ok());
  EXPECT_TRUE((*registry)->Transition(*a, RunStatus::kPaused).ok());
  EXPECT_TRUE((*registry)->Transition(*a, RunStatus::kRunning).ok());
  EXPECT_TRUE((*registry)->Transition(*a, RunStatus::kDone).ok());
  EXPECT_FALSE((*registry)->Transition(*a, RunStatus::kRunning).ok());
  EXPECT_EQ((*registry)->Get("run-999999").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(RunRegistryTest, StateRoundTripsAcrossReopen) {
  const std::string store = FreshStore();
  json before;
  {
    auto registry = RunRegistry::Open(store);
    ASSERT_TRUE(registry.ok());
    auto a = (*registry)->Create(SmallConfig(), nullptr);
    auto b = (*registry)->Create(SmallConfig(4), json{{"clients", 2}});
    ASSERT_TRUE(a.ok() && b.ok());
    ASSERT_TRUE((*registry)->Transition(*a, RunStatus::kRunning).ok());
    for (int r = 1; r <= 3; ++r) {
      ASSERT_TRUE((*registry)
                      ->AppendEvent(*a, {{"event", "round_complete"},
                                         {"round", r},
                                         {"accuracy", 0.5 + 0.1 * r}})
                      .ok());
    }
    ASSERT_TRUE((*registry)->AppendEvent(*a, {{"event", "done"}}).ok());
    ASSERT_TRUE((*registry)->Transition(*a, RunStatus::kDone).ok());
    before = (*registry)->StateJson();
  }
  auto reopened = RunRegistry::Open(store);
  ASSERT_TRUE(reopened.ok()) << reopened.status();
  EXPECT_EQ((*reopened)->StateJson().dump(), before.dump());
  // Ids keep advancing after a restart.
  auto c = (*reopened)->Create(SmallConfig(), nullptr);
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(*c, "run-000003");
}

TEST(RunRegistryTest, CorruptSnapshotFailsStartup) {
  const std::string store = FreshStore();
  std::string id;
  {
    auto registry = RunRegistry::Open(store);
    ASSERT_TRUE(registry.ok());
    id = *(*registry)->Create(SmallConfig(), nullptr);
  }
  std::ofstream(fs::path(store) / "runs" / id / "snapshot.json",
                std::ios::trunc)
      << "{\"id\": ";
  auto reopened = RunRegistry::Open(store);
  EXPECT_EQ(reopened.status().code(), absl::StatusCode::kDataLoss);
}

TEST(RunRegistryTest, TornFinalEventLineIsDropped) {
  const std::string store = FreshStore();
  std::string id;
  {
    auto registry = RunRegistry::Open(store);
    ASSERT_TRUE(registry.ok());
    id = *(*registry)->Create(SmallConfig(), nullptr);
    ASSERT_TRUE((*registry)->Transition(id, RunStatus::kRunning).ok());
    ASSERT_TRUE(
        (*registry)->AppendEvent(id, {{"event", "round_complete"}, {"round", 1}})
            .ok());
  }
  std::ofstream(fs::path(store) / "runs" / id / "events.jsonl", std::ios::app)
      << "{\"event\": \"round_comp";
  auto reopened = RunRegistry::Open(store);
  ASSERT_TRUE(reopened.ok()) << reopened.status();
  EXPECT_EQ(RoundCount(**reopened, id), 1);
}

TEST(RunManagerTest, RunsToCompletionWithMonotoneRounds) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok());
  RunManager runs(registry->get());
  auto id = runs.Submit(SmallConfig(4), nullptr);
  ASSERT_TRUE(id.ok()) << id.status();
  runs.JoinAll();
  EXPECT_EQ(StatusOf(**registry, *id), RunStatus::kDone);
  auto events = (*registry)->Events(*id);
  ASSERT_TRUE(events.ok());
  ASSERT_EQ(events->size(), 5u);
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ((*events)[r]["event"], "round_complete");
    EXPECT_EQ((*events)[r]["round"], r + 1);
  }
  EXPECT_EQ(events->back()["event"], "done");
}

TEST(RunManagerTest, RejectsInvalidConfigWithoutRegistering) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok());
  RunManager runs(registry->get());
  json bad = SmallConfig();
  bad["bogus"] = 1;
  EXPECT_EQ(runs.Submit(bad, nullptr).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE((*registry)->List().empty());
}

TEST(RunManagerTest, ConcurrentRunsAreIsolated) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok());
  std::string a, b;
  {
    RunManager runs(registry->get());
    a = *runs.Submit(SmallConfig(), nullptr);
    b = *runs.Submit(SmallConfig(), nullptr);
    runs.JoinAll();
  }
  // Identical configs give identical trajectories with separate logs.
  auto ea = (*registry)->Events(a);
  auto eb = (*registry)->Events(b);
  ASSERT_TRUE(ea.ok() && eb.ok());
  EXPECT_EQ(json(*ea).dump(), json(*eb).dump());
  EXPECT_EQ((*ea).back()["event"], "done");
}

TEST(RunManagerTest, CalibrationFailureBecomesWarningAndAbort) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok());
  RunManager runs(registry->get());
  json config = SmallConfig();
  config["privacy"] = {{"target_epsilon", 1e-6}};
  auto id = runs.Submit(config, nullptr);
  ASSERT_TRUE(id.ok()) << id.status();
  runs.JoinAll();
  EXPECT_EQ(StatusOf(**registry, *id), RunStatus::kAborted);
  auto warnings = (*registry)->Events(*id, 0, "warning");
  ASSERT_TRUE(warnings.ok());
  ASSERT_EQ(warnings->size(), 1u);
  EXPECT_EQ((*warnings)[0]["kind"], "calibration-failure");
  EXPECT_FALSE((*warnings)[0]["remedies"].empty());
}

TEST(RunManagerTest, PauseResumeAbort) {
  auto registry = RunRegistry::Open(FreshStore());
  ASSERT_TRUE(registry.ok());
  RunManager runs(registry->get());
  auto id = runs.Submit(SlowConfig(), nullptr);
  ASSERT_TRUE(id.ok()) << id.status();
  ASSERT_TRUE(WaitFor([&] { return RoundCount(**registry, *id) >= 1; }));
  ASSERT_TRUE(runs.Pause(*id).ok());
  EXPECT_FALSE(runs.Pause(*id).ok());
  // At most the in-flight round completes while paused.
  const int64_t at_pause = RoundCount(**registry, *id);
  std::this_thread::sleep_for(std::chrono::milliseconds(1500));
  const int64_t held = RoundCount(**registry, *id);
  EXPECT_LE(held, at_pause + 1);
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  EXPECT_EQ(RoundCount(**registry, *id), held);
  EXPECT_EQ(StatusOf(**registry, *id), RunStatus::kPaused);

  ASSERT_TRUE(runs.Resume(*id).ok());
  ASSERT_TRUE(WaitFor([&] { return RoundCount(**registry, *id) > held; }));
  ASSERT_TRUE(runs.Abort(*id).ok());
  ASSERT_TRUE(WaitFor(
      [&] { return StatusOf(**registry, *id) == RunStatus::kAborted; }));
  EXPECT_LT(RoundCount(**registry, *id), 200);
  auto snap = (*registry)->Get(*id);
  EXPECT_EQ(snap->diagnostic, "aborted by request");
  EXPECT_EQ(runs.Abort(*id).code(), absl::StatusCode::kFailedPrecondition);
}

TEST(RunManagerTest, RestartAbortsInterruptedAndStartsPendingRuns) {
  const std::string store = FreshStore();
  std::string interrupted, pending;
  {
    auto registry = RunRegistry::Open(store);
    ASSERT_TRUE(registry.ok());
    interrupted = *(*registry)->Create(SmallConfig(), nullptr);
    pending = *(*registry)->Create(SmallConfig(), nullptr);
    ASSERT_TRUE((*registry)->Transition(interrupted, RunStatus::kRunning).ok());
  }
  auto registry = RunRegistry::Open(store);
  ASSERT_TRUE(registry.ok());
  RunManager runs(registry->get());
  ASSERT_TRUE(runs.RecoverAfterRestart().ok());
  runs.JoinAll();
  auto snap = (*registry)->Get(interrupted);
  EXPECT_EQ(snap->status, RunStatus::kAborted);
  EXPECT_EQ(snap->diagnostic, "interrupted by service restart");
  EXPECT_EQ(StatusOf(**registry, pending), RunStatus::kDone);
}

TEST(CalibrateRequestTest, MatchesDirectCalibration) {
  auto request = CalibrateRequest::FromJson(json::parse(R"({
      "epsilon": 10, "delta": 1e-6, "scheme": "fixed", "batch": 550,
      "dataset_size": 90962, "rounds": 5})"));
  ASSERT_TRUE(request.ok()) << request.status();
  EXPECT_EQ(request->EffectiveAdjacency(), accountant::Adjacency::kReplaceOne);
  EXPECT_EQ(request->Steps(), 5 * 166);
  auto results = RunCalibrate(*request);
  ASSERT_TRUE(results.ok());
  ASSERT_EQ(results->size(), 1u);
  auto scheme = request->Scheme();
  ASSERT_TRUE(scheme.ok());
  auto direct =
      accountant::CalibrateSigma({10.0, 1e-6}, *scheme, request->Steps(),
                                 accountant::IntegerOrders(2, 256));
  ASSERT_TRUE(direct.ok());
  EXPECT_EQ((*results)[0].calibration.sigma, direct->sigma);
}

TEST(CalibrateRequestTest, RejectsMalformedRequests) {
  for (const char* body : {
           R"({"delta": 1e-6, "batch": 10, "dataset_size": 100})",
           R"({"epsilon": 1, "epsilons": [1], "batch": 10, "dataset_size": 100})",
           R"({"epsilon": 1, "batch": 200, "dataset_size": 100})",
           R"({"epsilon": 1, "batch": 10, "dataset_size": 100, "scheme": "x"})",
           R"({"epsilon": 1, "batch": 10, "dataset_size": 100, "orders": [9, 3]})",
           R"({"epsilon": 1, "batch": 10, "dataset_size": 100, "extra": 0})",
       }) {
    auto request = CalibrateRequest::FromJson(json::parse(body));
    EXPECT_FALSE(request.ok()) << body;
  }
}

class HttpServiceTest : public testing::Test {
 protected:
  void SetUp() override { Start(FreshStore()); }
  void TearDown() override { Stop(); }

  void Start(const std::string& store) {
    store_ = store;
    auto registry = RunRegistry::Open(store_);
    ASSERT_TRUE(registry.ok()) << registry.status();
    registry_ = std::move(*registry);
    runs_ = std::make_unique<RunManager>(registry_.get());
    ASSERT_TRUE(runs_->RecoverAfterRestart().ok());
    service_ = std::make_unique<FlipService>(registry_.get(), runs_.get(),
                                             practitioner::GoalPolicyTable{});
    server_ = std::make_unique<httplib::Server>();
    service_->Mount(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(120, 0);
  }

  void Stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    client_.reset();
    server_.reset();
    service_.reset();
    runs_.reset();
    registry_.reset();
  }

  json PostJson(const std::string& path, const json& body, int expect) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body, nullptr, false);
  }

  json GetJson(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body, nullptr, false);
  }

  std::string store_;
  std::unique_ptr<RunRegistry> registry_;
  std::unique_ptr<RunManager> runs_;
  std::unique_ptr<FlipService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpServiceTest, CalibrateIsByteIdentical) {
  const std::string body =
      R"({"epsilons": [6, 10], "delta": 1e-6, "scheme": "poisson",
          "batch": 550, "dataset_size": 90962, "rounds": 5})";
  auto first = client_->Post("/calibrate", body, "application/json");
  auto second = client_->Post("/calibrate", body, "application/json");
  ASSERT_TRUE(first && second);
  ASSERT_EQ(first->status, 200) << first->body;
  EXPECT_EQ(first->body, second->body);
  json j = json::parse(first->body);
  ASSERT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["adjacency"], "add-remove");
  EXPECT_EQ(j["steps"], 5 * 166);
  // More budget needs less noise.
  EXPECT_GT(j["results"][0]["sigma"].get<double>(),
            j["results"][1]["sigma"].get<double>());
  for (const auto& r : j["results"]) {
    EXPECT_LE(r["epsilon"].get<double>(), r["target_epsilon"].get<double>());
  }
}

TEST_F(HttpServiceTest, PartitionsMatchesKnownSplit) {
  auto first = client_->Get("/partitions?n=67349&k=4&policy=square");
  auto second = client_->Get("/partitions?n=67349&k=4&policy=square");
  ASSERT_TRUE(first && second);
  ASSERT_EQ(first->status, 200);
  EXPECT_EQ(first->body, second->body);
  json j = json::parse(first->body);
  EXPECT_EQ(j["sizes"], json({2244, 8979, 20204, 35922}));
}

TEST_F(HttpServiceTest, ErrorsMapToStatusCodes) {
  GetJson("/partitions?n=10&policy=iid", 400);
  GetJson("/partitions?n=10&k=4&policy=zipf", 400);
  json err = GetJson("/runs/run-123456", 404);
  EXPECT_EQ(err["error"]["code"], "NOT_FOUND");
  auto res = client_->Post("/calibrate", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  json calib = PostJson("/calibrate",
                        {{"epsilon", 1e-4},
                         {"delta", 1e-6},
                         {"batch", 550},
                         {"dataset_size", 2000},
                         {"rounds", 5}},
                        422);
  EXPECT_EQ(calib["error"]["code"], "calibration_failure");
  PostJson("/runs", {{"config", SmallConfig()}, {"extra", 1}}, 400);
}

TEST_F(HttpServiceTest, RecommendWritesAuditLog) {
  json req = {{"goal", "mitigate-mia"},
              {"clients", 4},
              {"dataset_size", 67349},
              {"policy_hint", "square"},
              {"memory_budget", 1000},
              {"model_units", 42}};
  json rec = PostJson("/recommend", req, 200);
  ASSERT_TRUE(rec.is_object());
  EXPECT_EQ(rec["partition_sizes"], json({2244, 8979, 20204, 35922}));
  std::ifstream audit(fs::path(store_) / "audit.jsonl");
  std::string line;
  ASSERT_TRUE(std::getline(audit, line));
  json entry = json::parse(line);
  EXPECT_EQ(entry["recommendation"], rec);
  EXPECT_TRUE(entry.contains("policy_table"));
}

TEST_F(HttpServiceTest, RunLifecycleAndRoundStream) {
  json created = PostJson("/runs", {{"config", SmallConfig(4)}}, 201);
  const std::string id = created["id"];
  // The follow stream ends when the run reaches a terminal status.
  auto res = client_->Get("/runs/" + id + "/rounds?follow=1");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  std::istringstream lines(res->body);
  std::string line;
  int expected = 1;
  while (std::getline(lines, line)) {
    json e = json::parse(line);
    EXPECT_EQ(e["round"], expected++);
  }
  EXPECT_EQ(expected, 5);
  runs_->JoinAll();

  json run = GetJson("/runs/" + id);
  EXPECT_EQ(run["status"], "done");
  EXPECT_EQ(run["rounds_completed"], 4);
  json list = GetJson("/runs");
  ASSERT_EQ(list["runs"].size(), 1u);
  EXPECT_EQ(list["runs"][0]["id"], id);

  auto tail = client_->Get("/runs/" + id + "/rounds?from=2");
  ASSERT_TRUE(tail);
  std::istringstream tail_lines(tail->body);
  ASSERT_TRUE(std::getline(tail_lines, line));
  EXPECT_EQ(json::parse(line)["round"], 3);
  json warnings = GetJson("/runs/" + id + "/warnings");
  EXPECT_TRUE(warnings["warnings"].empty());
  PostJson("/runs/" + id + "/pause", json::object(), 409);
}

TEST_F(HttpServiceTest, ControlEndpoints) {
  json created = PostJson("/runs", {{"config", SlowConfig()}}, 201);
  const std::string id = created["id"];
  ASSERT_TRUE(WaitFor([&] { return RoundCount(*registry_, id) >= 1; }));
  json paused = PostJson("/runs/" + id + "/pause", json::object(), 200);
  EXPECT_EQ(paused["status"], "paused");
  json resumed = PostJson("/runs/" + id + "/resume", json::object(), 200);
  EXPECT_EQ(resumed["status"], "running");
  PostJson("/runs/" + id + "/abort", json::object(), 200);
  ASSERT_TRUE(WaitFor(
      [&] { return StatusOf(*registry_, id) == RunStatus::kAborted; }));
  PostJson("/runs/" + id + "/restart", json::object(), 404);
}

TEST_F(HttpServiceTest, WarningsCarryRemedies) {
  // A perfect-accuracy floor is out of reach on overlapping blobs.
  json requirements = {{"goal", "mitigate-mia"},
                       {"clients", 2},
                       {"dataset_size", 1000},
                       {"memory_budget", 1000},
                       {"model_units", 42},
                       {"min_accuracy", 1.0}};
  auto req = practitioner::RequirementsFromJson(requirements);
  ASSERT_TRUE(req.ok()) << req.status();
  json created = PostJson(
      "/runs", {{"config", SmallConfig(4)}, {"requirements", requirements}},
      201);
  runs_->JoinAll();
  json warnings = GetJson("/runs/" + created["id"].get<std::string>() +
                          "/warnings");
  ASSERT_FALSE(warnings["warnings"].empty());
  EXPECT_EQ(warnings["warnings"][0]["kind"], "accuracy-shortfall");
  EXPECT_FALSE(warnings["warnings"][0]["remedies"].empty());
}

TEST_F(HttpServiceTest, StateSurvivesServiceRestart) {
  PostJson("/runs", {{"config", SmallConfig()}}, 201);
  PostJson("/runs", {{"config", SmallConfig(2)}}, 201);
  runs_->JoinAll();
  const std::string runs_before = GetJson("/runs").dump();
  const json state_before = registry_->StateJson();
  const std::string store = store_;
  Stop();
  Start(store);
  EXPECT_EQ(registry_->StateJson().dump(), state_before.dump());
  EXPECT_EQ(GetJson("/runs").dump(), runs_before);
}

}  // namespace
}  // namespace flip::service
