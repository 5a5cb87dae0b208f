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

#include "flip/fl/serialization.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/json_reader.h"
#include "flip/common/status.h"

namespace flip::fl {
namespace {

using nlohmann::json;
using flip::ObjectReader;

json EpsilonToJson(double eps) {
  return std::isfinite(eps) ? json(eps) : json(nullptr);
}

double EpsilonFromJson(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity()
                     : j.get<double>();
}

}  // namespace

std::string AccountingName(accountant::AccountingConvention convention) {
  return convention == accountant::AccountingConvention::kPerStep
             ? "per-step"
             : "per-round";
}

absl::StatusOr<accountant::AccountingConvention> ParseAccounting(
    const std::string& name) {
  if (name == "per-step") return accountant::AccountingConvention::kPerStep;
  if (name == "per-round") return accountant::AccountingConvention::kPerRound;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown accounting convention '", name, "', expected per-step|per-round"));
}

json ConfigToJson(const FederationConfig& c) {
  json privacy = {
      {"enabled", c.privacy.enabled},
      {"clip_norm", c.privacy.clip_norm},
      {"injection", dpsgd::InjectionName(c.privacy.injection)},
      {"sampler", dpsgd::SamplerName(c.privacy.sampler)},
      {"adjacency", accountant::AdjacencyName(c.privacy.adjacency)},
      {"accounting", AccountingName(c.privacy.accounting)},
      {"sigmas", c.privacy.sigmas},
      {"deltas", c.privacy.deltas},
  };
  if (c.privacy.target_epsilon.has_value()) {
    privacy["target_epsilon"] = *c.privacy.target_epsilon;
  }
  return {
      {"clients", c.clients},
      {"rounds", c.rounds},
      {"local_epochs", c.local_epochs},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"policy", partition::PolicyName(c.policy)},
      {"seed", c.seed},
      {"parallelism", c.parallelism},
      {"gradient_workers", c.gradient_workers},
      {"model",
       {{"architecture", dpsgd::ArchitectureName(c.model.architecture)},
        {"dim", c.model.dim},
        {"classes", c.model.classes},
        {"hidden", c.model.hidden}}},
      {"data",
       {{"train_size", c.data.train_size},
        {"test_size", c.data.test_size},
        {"dim", c.data.dim},
        {"classes", c.data.classes},
        {"separation", c.data.separation}}},
      {"privacy", privacy},
  };
}

absl::StatusOr<FederationConfig> ConfigFromJson(const json& j) {
  FederationConfig c;
  ObjectReader top(j, "config");
  top.Get("clients", c.clients);
  top.Get("rounds", c.rounds);
  top.Get("local_epochs", c.local_epochs);
  top.Get("learning_rate", c.learning_rate);
  top.Get("batch_size", c.batch_size);
  top.GetEnum("policy", c.policy, [](const std::string& s) {
    return partition::ParsePolicy(s);
  });
  top.Get("seed", c.seed);
  top.Get("parallelism", c.parallelism);
  top.Get("gradient_workers", c.gradient_workers);

  if (top.Has("data")) {
    ObjectReader data(top.Sub("data"), "config.data");
    data.Get("train_size", c.data.train_size);
    data.Get("test_size", c.data.test_size);
    data.Get("dim", c.data.dim);
    data.Get("classes", c.data.classes);
    data.Get("separation", c.data.separation);
    RETURN_IF_ERROR(data.Finish());
  }
  c.model.dim = c.data.dim;
  c.model.classes = c.data.classes;
  if (top.Has("model")) {
    ObjectReader model(top.Sub("model"), "config.model");
    model.GetEnum("architecture", c.model.architecture,
                  dpsgd::ParseArchitecture);
    model.Get("dim", c.model.dim);
    model.Get("classes", c.model.classes);
    model.Get("hidden", c.model.hidden);
    RETURN_IF_ERROR(model.Finish());
  }
  if (top.Has("privacy")) {
    ObjectReader p(top.Sub("privacy"), "config.privacy");
    p.Get("enabled", c.privacy.enabled);
    p.Get("clip_norm", c.privacy.clip_norm);
    p.GetEnum("injection", c.privacy.injection, dpsgd::ParseInjection);
    p.GetEnum("sampler", c.privacy.sampler, dpsgd::ParseSampler);
    p.GetEnum("adjacency", c.privacy.adjacency, [](const std::string& s) {
      return accountant::ParseAdjacency(s);
    });
    p.GetEnum("accounting", c.privacy.accounting, ParseAccounting);
    p.GetOptional("target_epsilon", c.privacy.target_epsilon);
    p.Get("sigmas", c.privacy.sigmas);
    p.Get("deltas", c.privacy.deltas);
    RETURN_IF_ERROR(p.Finish());
  }
  RETURN_IF_ERROR(top.Finish());
  RETURN_IF_ERROR(c.Validate());
  return c;
}

absl::StatusOr<FederationConfig> LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open config '", path, "'"));
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config '", path, "' is not valid JSON"));
  }
  return ConfigFromJson(j);
}

json ClientSetupToJson(const ClientSetup& s) {
  return {{"client", s.client},
          {"partition_size", s.partition_size},
          {"sigma", s.sigma},
          {"delta", s.delta},
          {"local_steps", s.local_steps},
          {"accounted_per_round", s.accounted_per_round}};
}

absl::StatusOr<ClientSetup> ClientSetupFromJson(const json& j) {
  ClientSetup s;
  ObjectReader r(j, "client_setup");
  r.Get("client", s.client);
  r.Get("partition_size", s.partition_size);
  r.Get("sigma", s.sigma);
  r.Get("delta", s.delta);
  r.Get("local_steps", s.local_steps);
  r.Get("accounted_per_round", s.accounted_per_round);
  RETURN_IF_ERROR(r.Finish());
  return s;
}

json RoundToJson(const RoundMetrics& m) {
  json clients = json::array();
  for (const auto& c : m.clients) {
    clients.push_back({{"client", c.client},
                       {"participated", c.participated},
                       {"steps", c.steps},
                       {"skipped_steps", c.skipped_steps},
                       {"min_batch", c.min_batch},
                       {"max_batch", c.max_batch},
                       {"mean_batch", c.mean_batch},
                       {"memory_peak", c.memory_peak},
                       {"train_loss", c.train_loss},
                       {"test_accuracy", c.test_accuracy},
                       {"epsilon", EpsilonToJson(c.epsilon)}});
  }
  return {{"round", m.round},
          {"accuracy", m.accuracy},
          {"loss", m.loss},
          {"clients", clients}};
}

absl::StatusOr<RoundMetrics> RoundFromJson(const json& j) {
  RoundMetrics m;
  ObjectReader r(j, "round");
  r.Get("round", m.round);
  r.Get("accuracy", m.accuracy);
  r.Get("loss", m.loss);
  if (r.Has("clients")) {
    const json& arr = r.Sub("clients");
    if (!arr.is_array()) {
      return absl::InvalidArgumentError("round.clients: expected an array");
    }
    for (const json& cj : arr) {
      ClientRoundStats c;
      ObjectReader cr(cj, "round.clients[]");
      cr.Get("client", c.client);
      cr.Get("participated", c.participated);
      cr.Get("steps", c.steps);
      cr.Get("skipped_steps", c.skipped_steps);
      cr.Get("min_batch", c.min_batch);
      cr.Get("max_batch", c.max_batch);
      cr.Get("mean_batch", c.mean_batch);
      cr.Get("memory_peak", c.memory_peak);
      cr.Get("train_loss", c.train_loss);
      cr.Get("test_accuracy", c.test_accuracy);
      if (cr.Has("epsilon")) c.epsilon = EpsilonFromJson(cr.Sub("epsilon"));
      RETURN_IF_ERROR(cr.Finish());
      m.clients.push_back(c);
    }
  }
  RETURN_IF_ERROR(r.Finish());
  return m;
}

std::string RunRecordToJsonl(const RunRecord& record) {
  std::string out;
  json clients = json::array();
  for (const auto& s : record.clients) clients.push_back(ClientSetupToJson(s));
  out += json{{"event", "setup"}, {"clients", clients}}.dump() + "\n";
  for (const auto& r : record.rounds) {
    json e = RoundToJson(r);
    e["event"] = "round_complete";
    out += e.dump() + "\n";
  }
  json end = {{"event", record.aborted ? "aborted" : "done"},
              {"max_accuracy", record.MaxAccuracy()},
              {"final_parameters", record.final_parameters}};
  if (record.aborted) end["diagnostic"] = record.diagnostic;
  out += end.dump() + "\n";
  return out;
}

absl::StatusOr<RunRecord> RunRecordFromJsonl(const std::string& text) {
  RunRecord record;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json e = json::parse(line, nullptr, false);
    if (e.is_discarded() || !e.is_object() || !e.contains("event")) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d is not a run event", line_no));
    }
    const std::string kind = e["event"].get<std::string>();
    e.erase("event");
    if (kind == "setup") {
      for (const json& cj : e["clients"]) {
        ASSIGN_OR_RETURN(ClientSetup s, ClientSetupFromJson(cj));
        record.clients.push_back(s);
      }
    } else if (kind == "round_complete") {
      ASSIGN_OR_RETURN(RoundMetrics m, RoundFromJson(e));
      record.rounds.push_back(std::move(m));
    } else if (kind == "done" || kind == "aborted") {
      record.aborted = kind == "aborted";
      record.diagnostic = e.value("diagnostic", "");
      record.final_parameters =
          e.value("final_parameters", std::vector<double>{});
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: unknown event '%s'", line_no, kind));
    }
  }
  return record;
}

std::string SummaryCsv(const RunRecord& record) {
  const size_t k = record.clients.size();
  std::string out = "round,accuracy,loss";
  for (size_t i = 0; i < k; ++i) absl::StrAppend(&out, ",eps_client_", i);
  for (size_t i = 0; i < k; ++i) absl::StrAppend(&out, ",mem_peak_client_", i);
  out += "\n";
  for (const auto& r : record.rounds) {
    absl::StrAppend(&out, r.round, ",", absl::StrFormat("%.6f", r.accuracy),
                    ",", absl::StrFormat("%.6f", r.loss));
    for (const auto& c : r.clients) {
      absl::StrAppend(&out, ",",
                      std::isfinite(c.epsilon)
                          ? absl::StrFormat("%.6f", c.epsilon)
                          : std::string("inf"));
    }
    for (const auto& c : r.clients) absl::StrAppend(&out, ",", c.memory_peak);
    out += "\n";
  }
  return out;
}

}  // namespace flip::fl
