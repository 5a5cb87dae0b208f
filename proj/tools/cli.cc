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

#include "cli.h"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "flip/common/status.h"
#include "flip/fl/federation.h"
#include "flip/fl/serialization.h"
#include "flip/partition/partitioner.h"
#include "flip/practitioner/engine.h"
#include "flip/service/http_service.h"
#include "flip/service/requests.h"
#include "json.hpp"

namespace flip::cli {
namespace {

using nlohmann::json;

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

int Fail(const absl::Status& status, std::ostream& err) {
  err << service::ErrorResult(status).body;
  return ExitCode(status);
}

std::string Num(double v) { return absl::StrFormat("%.6g", v); }

absl::Status ParseOrders(const std::string& text, int& lo, int& hi) {
  std::vector<std::string> parts = absl::StrSplit(text, "..");
  if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &lo) ||
      !absl::SimpleAtoi(parts[1], &hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("--orders expects LO..HI, got '", text, "'"));
  }
  return absl::OkStatus();
}

absl::Status WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, " is not valid JSON"));
  }
  return j;
}

struct CalibrateArgs {
  std::vector<double> epsilons;
  double delta = 1e-6;
  std::string scheme = "poisson";
  int64_t batch = 550;
  int64_t dataset_size = 0;
  int64_t rounds = 5;
  int64_t local_epochs = 1;
  std::string adjacency;
  std::string accounting = "per-step";
  std::string orders = "2..256";
  int clients = 0;
  std::string policy = "iid";
  std::string dataset = "custom";
  std::string emit = "text";
};

struct CalibrateRow {
  std::string policy;
  std::string partition;
  int64_t partition_size = 0;
  std::string accountant;
  service::CalibrateRequest request;
  std::vector<service::CalibrateResult> results;
};

absl::StatusOr<std::vector<CalibrateRow>> Calibrate(const CalibrateArgs& a) {
  std::vector<std::string> schemes = {a.scheme};
  if (a.scheme == "both") schemes = {"poisson", "fixed"};

  // One (policy, partition, size) entry per row group.
  struct Part {
    std::string policy, partition;
    int64_t size;
  };
  std::vector<Part> parts;
  if (a.clients > 0) {
    ASSIGN_OR_RETURN(partition::PartitionPolicy policy,
                     partition::ParsePolicy(a.policy));
    ASSIGN_OR_RETURN(std::vector<int64_t> sizes,
                     partition::PartitionSizes(a.dataset_size, a.clients,
                                               policy));
    for (size_t i = 0; i < sizes.size(); ++i) {
      parts.push_back({partition::PolicyName(policy), std::to_string(i + 1),
                       sizes[i]});
    }
  } else {
    parts.push_back({"-", "all", a.dataset_size});
  }

  std::vector<CalibrateRow> rows;
  for (const std::string& scheme : schemes) {
    for (const Part& part : parts) {
      json req = {{"delta", a.delta},
                  {"scheme", scheme},
                  {"batch", a.batch},
                  {"dataset_size", part.size},
                  {"rounds", a.rounds},
                  {"local_epochs", a.local_epochs},
                  {"accounting", a.accounting}};
      if (a.epsilons.size() == 1) {
        req["epsilon"] = a.epsilons[0];
      } else {
        req["epsilons"] = a.epsilons;
      }
      if (!a.adjacency.empty()) req["adjacency"] = a.adjacency;
      int lo = 0, hi = 0;
      RETURN_IF_ERROR(ParseOrders(a.orders, lo, hi));
      req["orders"] = {lo, hi};
      CalibrateRow row;
      row.policy = part.policy;
      row.partition = part.partition;
      row.partition_size = part.size;
      row.accountant = scheme == "poisson" ? "poisson-rdp" : "fixed-size-rdp";
      ASSIGN_OR_RETURN(row.request, service::CalibrateRequest::FromJson(req));
      auto results = service::RunCalibrate(row.request);
      if (!results.ok()) {
        return absl::Status(
            results.status().code(),
            absl::StrCat(results.status().message(), " (", row.accountant,
                         ", partition ", part.partition, ")"));
      }
      row.results = *std::move(results);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int EmitCalibrate(const CalibrateArgs& a, std::ostream& out,
                  std::ostream& err) {
  if (a.emit != "text" && a.emit != "csv" && a.emit != "json") {
    return Fail(absl::InvalidArgumentError("--emit expects text|csv|json"),
                err);
  }
  auto rows = Calibrate(a);
  if (!rows.ok()) return Fail(rows.status(), err);
  if (a.emit == "csv") {
    out << "dataset,policy,partition,accountant,epsilon,sigma\n";
    for (const auto& row : *rows) {
      for (const auto& r : row.results) {
        out << a.dataset << "," << row.policy << "," << row.partition << ","
            << row.accountant << "," << Num(r.target_epsilon) << ","
            << absl::StrFormat("%.4f", r.calibration.sigma) << "\n";
      }
    }
  } else if (a.emit == "json") {
    json list = json::array();
    for (const auto& row : *rows) {
      json j = service::CalibrateResponse(row.request, row.results);
      j["accountant"] = row.accountant;
      j["policy"] = row.policy;
      j["partition"] = row.partition;
      list.push_back(j);
    }
    out << (list.size() == 1 ? list[0] : list).dump(2) << "\n";
  } else {
    for (const auto& row : *rows) {
      for (const auto& r : row.results) {
        out << row.accountant << " partition=" << row.partition
            << " n=" << row.partition_size << " steps=" << row.request.Steps()
            << " target_epsilon=" << Num(r.target_epsilon)
            << " sigma=" << absl::StrFormat("%.4f", r.calibration.sigma)
            << " order=" << Num(r.calibration.order)
            << " epsilon=" << absl::StrFormat("%.4f", r.calibration.epsilon)
            << "\n";
      }
    }
  }
  return kExitOk;
}

struct PartitionArgs {
  int64_t n = 0;
  int clients = 4;
  std::string policy = "iid";
  uint64_t seed = 0;
  std::string emit = "text";
};

int EmitPartition(const PartitionArgs& a, std::ostream& out,
                  std::ostream& err) {
  auto policy = partition::ParsePolicy(a.policy);
  if (!policy.ok()) return Fail(policy.status(), err);
  auto plan = partition::MakePlan(a.n, a.clients, *policy, a.seed);
  if (!plan.ok()) return Fail(plan.status(), err);
  if (a.emit == "csv") {
    out << "client_id,size\n";
    for (size_t i = 0; i < plan->sizes.size(); ++i) {
      out << i << "," << plan->sizes[i] << "\n";
    }
  } else if (a.emit == "json") {
    out << json({{"n", a.n},
                 {"k", a.clients},
                 {"policy", partition::PolicyName(*policy)},
                 {"seed", a.seed},
                 {"sizes", plan->sizes}})
               .dump()
        << "\n";
  } else if (a.emit == "text") {
    for (size_t i = 0; i < plan->sizes.size(); ++i) {
      out << (i ? " " : "") << plan->sizes[i];
    }
    out << "\n";
  } else {
    return Fail(absl::InvalidArgumentError("--emit expects text|csv|json"),
                err);
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string emit = "jsonl";
  std::string jsonl_out;
  std::string csv_out;
  std::optional<uint64_t> seed;
};

int EmitSimulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.emit != "jsonl" && a.emit != "csv" && a.emit != "none") {
    return Fail(absl::InvalidArgumentError("--emit expects jsonl|csv|none"),
                err);
  }
  auto config = fl::LoadConfigFile(a.config);
  if (!config.ok()) return Fail(config.status(), err);
  if (a.seed.has_value()) config->seed = *a.seed;
  const fl::FederationData data =
      fl::MakeFederationData(config->data, config->seed);
  auto record = fl::RunFederation(*config, data);
  if (!record.ok()) return Fail(record.status(), err);
  const std::string jsonl = fl::RunRecordToJsonl(*record);
  const std::string csv = fl::SummaryCsv(*record);
  if (!a.jsonl_out.empty()) {
    if (auto st = WriteFile(a.jsonl_out, jsonl); !st.ok()) return Fail(st, err);
  }
  if (!a.csv_out.empty()) {
    if (auto st = WriteFile(a.csv_out, csv); !st.ok()) return Fail(st, err);
  }
  if (a.emit == "jsonl") out << jsonl;
  if (a.emit == "csv") out << csv;
  if (record->aborted) {
    return Fail(NumericalFailureError(absl::StrCat(
                    "run aborted: ", record->diagnostic)),
                err);
  }
  return kExitOk;
}

struct RecommendArgs {
  std::string requirements;
  std::string policy_table;
  std::string base_config;
  std::string config_out;
};

int EmitRecommend(const RecommendArgs& a, std::ostream& out,
                  std::ostream& err) {
  auto j = ReadJsonFile(a.requirements);
  if (!j.ok()) return Fail(j.status(), err);
  auto req = practitioner::RequirementsFromJson(*j);
  if (!req.ok()) return Fail(req.status(), err);
  practitioner::GoalPolicyTable table;
  if (!a.policy_table.empty()) {
    auto loaded = practitioner::GoalPolicyTable::Load(a.policy_table);
    if (!loaded.ok()) return Fail(loaded.status(), err);
    table = *loaded;
  }
  auto rec = practitioner::Recommend(*req, table);
  if (!rec.ok()) return Fail(rec.status(), err);
  if (!a.config_out.empty()) {
    fl::FederationConfig base;
    if (!a.base_config.empty()) {
      auto loaded = fl::LoadConfigFile(a.base_config);
      if (!loaded.ok()) return Fail(loaded.status(), err);
      base = *loaded;
    }
    const fl::FederationConfig applied =
        practitioner::ApplyRecommendation(base, *rec);
    if (auto st = WriteFile(a.config_out,
                            fl::ConfigToJson(applied).dump(2) + "\n");
        !st.ok()) {
      return Fail(st, err);
    }
  }
  out << practitioner::RecommendationToJson(*rec).dump(2) << "\n";
  return kExitOk;
}

std::string EnvOr(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"FLIP privacy-preserving federated learning workbench", "flip"};
  app.require_subcommand(1, 1);

  CalibrateArgs cal;
  auto* calibrate =
      app.add_subcommand("calibrate", "Calibrate the noise multiplier");
  calibrate->add_option("--epsilon", cal.epsilons, "Target epsilon(s)")
      ->required()
      ->delimiter(',');
  calibrate->add_option("--delta", cal.delta, "Target delta")
      ->capture_default_str();
  calibrate->add_option("--scheme", cal.scheme, "Batch sampling scheme")
      ->check(CLI::IsMember({"poisson", "fixed", "both"}))
      ->capture_default_str();
  calibrate->add_option("--batch", cal.batch, "Expected or fixed batch size")
      ->capture_default_str();
  calibrate->add_option("--dataset-size", cal.dataset_size,
                        "Records held (split by --policy with --clients)")
      ->required();
  calibrate->add_option("--rounds", cal.rounds)->capture_default_str();
  calibrate->add_option("--local-epochs", cal.local_epochs)
      ->capture_default_str();
  calibrate
      ->add_option("--adjacency", cal.adjacency,
                   "Default: add-remove for poisson, replace-one for fixed")
      ->check(CLI::IsMember({"add-remove", "replace-one"}));
  calibrate->add_option("--accounting", cal.accounting)
      ->check(CLI::IsMember({"per-step", "per-round"}))
      ->capture_default_str();
  calibrate->add_option("--orders", cal.orders, "Integer order range LO..HI")
      ->capture_default_str();
  calibrate->add_option("--clients", cal.clients,
                        "Calibrate each of K partitions separately");
  calibrate->add_option("--policy", cal.policy)
      ->check(CLI::IsMember({"iid", "linear", "square", "exponential"}))
      ->capture_default_str();
  calibrate->add_option("--dataset", cal.dataset, "Label for the CSV")
      ->capture_default_str();
  calibrate->add_option("--emit", cal.emit)
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();

  PartitionArgs part;
  auto* partition_cmd =
      app.add_subcommand("partition", "Split a dataset across clients");
  partition_cmd->add_option("--n", part.n, "Total records")->required();
  partition_cmd->add_option("--clients", part.clients)->capture_default_str();
  partition_cmd->add_option("--policy", part.policy)
      ->check(CLI::IsMember({"iid", "linear", "square", "exponential"}))
      ->capture_default_str();
  partition_cmd->add_option("--seed", part.seed)->capture_default_str();
  partition_cmd->add_option("--emit", part.emit)
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();

  SimulateArgs sim;
  uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a federation");
  simulate->add_option("--config", sim.config, "Federation config (JSON)")
      ->required();
  simulate->add_option("--emit", sim.emit, "Stdout format")
      ->check(CLI::IsMember({"jsonl", "csv", "none"}))
      ->capture_default_str();
  simulate->add_option("--jsonl-out", sim.jsonl_out, "Write the event log");
  simulate->add_option("--csv-out", sim.csv_out, "Write the round summary");
  auto* seed_opt =
      simulate->add_option("--seed", sim_seed, "Override the master seed");

  RecommendArgs rec;
  auto* recommend =
      app.add_subcommand("recommend", "Map requirements to DP parameters");
  recommend->add_option("--requirements", rec.requirements,
                        "Requirements (JSON)")
      ->required();
  recommend->add_option("--policy-table", rec.policy_table,
                        "Goal to epsilon table (JSON)");
  recommend->add_option("--base-config", rec.base_config,
                        "Config the recommendation is applied to");
  recommend->add_option("--config-out", rec.config_out,
                        "Write the resulting federation config");

  service::ServeOptions serve_options;
  serve_options.address = EnvOr("FLIP_ADDR", serve_options.address);
  serve_options.store_path = EnvOr("FLIP_STORE", serve_options.store_path);
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--addr", serve_options.address, "host:port (FLIP_ADDR)")
      ->capture_default_str();
  serve->add_option("--store", serve_options.store_path,
                    "Run store directory (FLIP_STORE)")
      ->capture_default_str();
  serve->add_option("--policy-table", serve_options.policy_table_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << json({{"error", {{"code", "usage"}, {"message", e.what()}}}}).dump()
        << "\n";
    return kExitUsage;
  }

  if (*calibrate) return EmitCalibrate(cal, out, err);
  if (*partition_cmd) return EmitPartition(part, out, err);
  if (*simulate) {
    if (*seed_opt) sim.seed = sim_seed;
    return EmitSimulate(sim, out, err);
  }
  if (*recommend) return EmitRecommend(rec, out, err);
  serve_options.on_ready = [&out, &serve_options](int port) {
    out << "flip: serving on port " << port << " (store "
        << serve_options.store_path << ")" << std::endl;
  };
  absl::Status status = service::Serve(serve_options);
  if (!status.ok()) return Fail(status, err);
  return kExitOk;
}

}  // namespace flip::cli
