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

#include "flip/service/run_registry.h"

#include <filesystem>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/status.h"

namespace flip::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kSnapshotFile[] = "snapshot.json";
constexpr char kEventsFile[] = "events.jsonl";

absl::Status WriteFileAtomically(const fs::path& path,
                                 const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << contents;
    out.flush();
    if (!out) {
      return absl::UnavailableError(
          absl::StrCat("cannot write ", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot rename ", tmp.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

}  // namespace

std::string RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kPending:
      return "pending";
    case RunStatus::kRunning:
      return "running";
    case RunStatus::kPaused:
      return "paused";
    case RunStatus::kDone:
      return "done";
    case RunStatus::kAborted:
      return "aborted";
  }
  return "unknown";
}

absl::StatusOr<RunStatus> ParseRunStatus(const std::string& name) {
  for (RunStatus s : {RunStatus::kPending, RunStatus::kRunning,
                      RunStatus::kPaused, RunStatus::kDone,
                      RunStatus::kAborted}) {
    if (RunStatusName(s) == name) return s;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown run status '", name, "'"));
}

bool IsTerminal(RunStatus status) {
  return status == RunStatus::kDone || status == RunStatus::kAborted;
}

bool IsValidTransition(RunStatus from, RunStatus to) {
  switch (from) {
    case RunStatus::kPending:
      return to == RunStatus::kRunning;
    case RunStatus::kRunning:
      return to == RunStatus::kPaused || to == RunStatus::kDone ||
             to == RunStatus::kAborted;
    case RunStatus::kPaused:
      return to == RunStatus::kRunning || to == RunStatus::kAborted;
    case RunStatus::kDone:
    case RunStatus::kAborted:
      return false;
  }
  return false;
}

json RunSnapshot::ToJson() const {
  return {{"id", id},
          {"status", RunStatusName(status)},
          {"config", config},
          {"requirements", requirements},
          {"diagnostic", diagnostic},
          {"event_count", event_count},
          {"rounds_completed", rounds_completed}};
}

absl::StatusOr<std::unique_ptr<RunRegistry>> RunRegistry::Open(
    const std::string& store_path) {
  std::error_code ec;
  fs::create_directories(fs::path(store_path) / "runs", ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "store path '", store_path, "' is not writable: ", ec.message()));
  }
  std::unique_ptr<RunRegistry> registry(new RunRegistry(store_path));
  RETURN_IF_ERROR(registry->Load());
  return registry;
}

std::string RunRegistry::RunDir(const std::string& id) const {
  return (fs::path(store_path_) / "runs" / id).string();
}

absl::Status RunRegistry::Load() {
  for (const auto& dir : fs::directory_iterator(fs::path(store_path_) / "runs")) {
    if (!dir.is_directory()) continue;
    const fs::path snap_path = dir.path() / kSnapshotFile;
    std::ifstream in(snap_path);
    if (!in) {
      return absl::DataLossError(
          absl::StrCat("store corrupt: missing ", snap_path.string()));
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::DataLossError(
          absl::StrCat("store corrupt: cannot parse ", snap_path.string()));
    }
    Entry entry;
    try {
      entry.snapshot.id = j.at("id").get<std::string>();
      auto status = ParseRunStatus(j.at("status").get<std::string>());
      if (!status.ok()) {
        return absl::DataLossError(absl::StrCat(
            "store corrupt: ", snap_path.string(), ": ",
            std::string(status.status().message())));
      }
      entry.snapshot.status = *status;
      entry.snapshot.config = j.at("config");
      entry.snapshot.requirements = j.at("requirements");
      entry.snapshot.diagnostic = j.at("diagnostic").get<std::string>();
    } catch (const json::exception& e) {
      return absl::DataLossError(absl::StrCat(
          "store corrupt: ", snap_path.string(), ": ", e.what()));
    }
    // The event log is authoritative. A torn final line from an interrupted
    // append is dropped.
    std::ifstream events(dir.path() / kEventsFile);
    std::string line;
    while (std::getline(events, line)) {
      if (line.empty()) continue;
      json e = json::parse(line, nullptr, false);
      if (e.is_discarded()) break;
      if (e.value("event", "") == "round_complete") {
        ++entry.snapshot.rounds_completed;
      }
      entry.events.push_back(std::move(e));
    }
    entry.snapshot.event_count = static_cast<int64_t>(entry.events.size());
    int64_t number = 0;
    if (sscanf(entry.snapshot.id.c_str(), "run-%ld", &number) == 1) {
      next_id_ = std::max(next_id_, number + 1);
    }
    runs_[entry.snapshot.id] = std::move(entry);
  }
  return absl::OkStatus();
}

absl::Status RunRegistry::WriteSnapshot(const Entry& entry) const {
  const RunSnapshot& s = entry.snapshot;
  json j = {{"id", s.id},
            {"status", RunStatusName(s.status)},
            {"config", s.config},
            {"requirements", s.requirements},
            {"diagnostic", s.diagnostic}};
  return WriteFileAtomically(fs::path(RunDir(s.id)) / kSnapshotFile,
                             j.dump() + "\n");
}

absl::StatusOr<std::string> RunRegistry::Create(const json& config,
                                                const json& requirements) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::string id = absl::StrFormat("run-%06d", next_id_++);
  std::error_code ec;
  fs::create_directories(RunDir(id), ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create run directory: ", ec.message()));
  }
  Entry entry;
  entry.snapshot.id = id;
  entry.snapshot.config = config;
  entry.snapshot.requirements = requirements;
  RETURN_IF_ERROR(WriteSnapshot(entry));
  std::ofstream(fs::path(RunDir(id)) / kEventsFile, std::ios::app);
  runs_[id] = std::move(entry);
  changed_.notify_all();
  return id;
}

absl::Status RunRegistry::Transition(const std::string& id, RunStatus to,
                                     const std::string& diagnostic) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    return absl::NotFoundError(absl::StrCat("no run '", id, "'"));
  }
  RunSnapshot& s = it->second.snapshot;
  if (!IsValidTransition(s.status, to)) {
    return absl::FailedPreconditionError(
        absl::StrCat("run ", id, " cannot go from ", RunStatusName(s.status),
                     " to ", RunStatusName(to)));
  }
  const RunStatus previous = s.status;
  const std::string previous_diagnostic = s.diagnostic;
  s.status = to;
  if (!diagnostic.empty()) s.diagnostic = diagnostic;
  if (absl::Status st = WriteSnapshot(it->second); !st.ok()) {
    s.status = previous;
    s.diagnostic = previous_diagnostic;
    return st;
  }
  changed_.notify_all();
  return absl::OkStatus();
}

absl::Status RunRegistry::AppendEvent(const std::string& id,
                                      const json& event) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    return absl::NotFoundError(absl::StrCat("no run '", id, "'"));
  }
  {
    std::ofstream out(fs::path(RunDir(id)) / kEventsFile, std::ios::app);
    out << event.dump() << "\n";
    out.flush();
    if (!out) {
      return absl::UnavailableError(
          absl::StrCat("cannot append to the event log of ", id));
    }
  }
  Entry& entry = it->second;
  entry.events.push_back(event);
  entry.snapshot.event_count = static_cast<int64_t>(entry.events.size());
  if (event.value("event", "") == "round_complete") {
    ++entry.snapshot.rounds_completed;
  }
  changed_.notify_all();
  return absl::OkStatus();
}

absl::StatusOr<RunSnapshot> RunRegistry::Get(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    return absl::NotFoundError(absl::StrCat("no run '", id, "'"));
  }
  return it->second.snapshot;
}

std::vector<RunSnapshot> RunRegistry::List() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<RunSnapshot> out;
  for (const auto& [id, entry] : runs_) out.push_back(entry.snapshot);
  return out;
}

absl::StatusOr<std::vector<json>> RunRegistry::Events(
    const std::string& id, int64_t from, const std::string& kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    return absl::NotFoundError(absl::StrCat("no run '", id, "'"));
  }
  std::vector<json> out;
  const auto& events = it->second.events;
  for (int64_t i = std::max<int64_t>(0, from);
       i < static_cast<int64_t>(events.size()); ++i) {
    if (kind.empty() || events[i].value("event", "") == kind) {
      out.push_back(events[i]);
    }
  }
  return out;
}

absl::StatusOr<int64_t> RunRegistry::WaitForEvents(
    const std::string& id, int64_t from, std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    return absl::NotFoundError(absl::StrCat("no run '", id, "'"));
  }
  const Entry& entry = it->second;
  changed_.wait_for(lock, timeout, [&] {
    return static_cast<int64_t>(entry.events.size()) > from ||
           IsTerminal(entry.snapshot.status);
  });
  return static_cast<int64_t>(entry.events.size());
}

json RunRegistry::StateJson() const {
  std::lock_guard<std::mutex> lock(mu_);
  json runs = json::array();
  for (const auto& [id, entry] : runs_) {
    json r = entry.snapshot.ToJson();
    r["events"] = entry.events;
    runs.push_back(std::move(r));
  }
  return {{"next_id", next_id_}, {"runs", runs}};
}

}  // namespace flip::service
