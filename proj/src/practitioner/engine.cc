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

#include "flip/practitioner/engine.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "boost/math/distributions/binomial.hpp"
#include "flip/common/json_reader.h"
#include "flip/common/status.h"
#include "flip/dpsgd/local_training.h"
#include "flip/fl/serialization.h"

namespace flip::practitioner {
namespace {

using nlohmann::json;

constexpr char kExpandPartition[] = "expand data partition";
constexpr char kMemoryAndAccountant[] = "increase memory and switch accountant";
constexpr char kRelaxEpsilon[] = "relax epsilon";
constexpr char kReduceBatch[] = "reduce batch size";

// log P(X <= x) for X ~ Binomial(n, q).
double LogBinomialCdf(int64_t n, double q, int64_t x) {
  if (x >= n) return 0.0;
  if (x < 0) return -INFINITY;
  boost::math::binomial_distribution<double> dist(static_cast<double>(n), q);
  const double upper =
      boost::math::cdf(boost::math::complement(dist, static_cast<double>(x)));
  return std::log1p(-upper);
}

}  // namespace

std::string GoalName(PrivacyGoal goal) {
  switch (goal) {
    case PrivacyGoal::kMitigateMia:
      return "mitigate-mia";
    case PrivacyGoal::kMitigateReconstruction:
      return "mitigate-reconstruction";
    case PrivacyGoal::kRegulatory:
      return "regulatory";
  }
  return "unknown";
}

absl::StatusOr<PrivacyGoal> ParseGoal(const std::string& name) {
  if (name == "mitigate-mia") return PrivacyGoal::kMitigateMia;
  if (name == "mitigate-reconstruction") {
    return PrivacyGoal::kMitigateReconstruction;
  }
  if (name == "regulatory") return PrivacyGoal::kRegulatory;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown privacy goal '", name,
      "', expected mitigate-mia|mitigate-reconstruction|regulatory"));
}

json GoalPolicyTable::ToJson() const {
  return {{"mitigate-mia", mia_epsilon},
          {"mitigate-reconstruction", reconstruction_epsilon}};
}

absl::StatusOr<GoalPolicyTable> GoalPolicyTable::FromJson(const json& j) {
  GoalPolicyTable t;
  ObjectReader r(j, "policy_table");
  r.Get("mitigate-mia", t.mia_epsilon);
  r.Get("mitigate-reconstruction", t.reconstruction_epsilon);
  RETURN_IF_ERROR(r.Finish());
  if (!(t.mia_epsilon > 0) || !(t.reconstruction_epsilon > 0)) {
    return absl::InvalidArgumentError("policy table epsilons must be positive");
  }
  return t;
}

absl::StatusOr<GoalPolicyTable> GoalPolicyTable::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open policy table '", path, "'"));
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("policy table '", path, "' is not valid JSON"));
  }
  return FromJson(j);
}

std::string AccountantName(AccountantChoice choice) {
  return choice == AccountantChoice::kPoissonRdp ? "poisson-rdp"
                                                 : "fixed-size-rdp";
}

absl::StatusOr<AccountantChoice> ParseAccountant(const std::string& name) {
  if (name == "poisson-rdp") return AccountantChoice::kPoissonRdp;
  if (name == "fixed-size-rdp") return AccountantChoice::kFixedSizeRdp;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown accountant '", name, "', expected poisson-rdp|fixed-size-rdp"));
}

absl::Status Requirements::Validate() const {
  if (goal == PrivacyGoal::kRegulatory && !(regulatory_epsilon > 0.0)) {
    return absl::InvalidArgumentError("regulatory epsilon must be positive");
  }
  if (min_accuracy.has_value() &&
      !(*min_accuracy >= 0.0 && *min_accuracy <= 1.0)) {
    return absl::InvalidArgumentError("min_accuracy must lie in [0, 1]");
  }
  if (clients < 1) return absl::InvalidArgumentError("clients must be >= 1");
  if (!partition_sizes.empty()) {
    if (static_cast<int64_t>(partition_sizes.size()) != clients) {
      return absl::InvalidArgumentError(
          "partition_sizes must have one entry per client");
    }
    for (int64_t s : partition_sizes) {
      if (s < 1) {
        return absl::InvalidArgumentError("partition sizes must be positive");
      }
    }
  } else if (dataset_size < clients) {
    return absl::InvalidArgumentError(
        "either partition_sizes or a dataset_size >= clients is required");
  }
  if (model_units < 0 || per_example_units < 1) {
    return absl::InvalidArgumentError(
        "model_units must be >= 0 and per_example_units >= 1");
  }
  if (memory_budget <= model_units) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "memory budget %d must exceed the model size %d", memory_budget,
        model_units));
  }
  if (max_batch_size.has_value() && *max_batch_size < 1) {
    return absl::InvalidArgumentError("max_batch_size must be >= 1");
  }
  if (rounds < 1 || local_epochs < 1) {
    return absl::InvalidArgumentError("rounds and local_epochs must be >= 1");
  }
  return absl::OkStatus();
}

double ExpectedBinomialMax(int64_t n, double q, int64_t draws) {
  if (q >= 1.0) return static_cast<double>(n);
  if (q <= 0.0 || n == 0) return 0.0;
  // E[M] = sum_{x >= 0} P(M > x); terms below the bulk are 1 to machine
  // precision.
  const double mean = n * q;
  const double sd = std::sqrt(n * q * (1.0 - q));
  const int64_t lo = std::max<int64_t>(
      0, static_cast<int64_t>(std::floor(mean - 40.0 * sd - 1.0)));
  double total = static_cast<double>(lo);
  for (int64_t x = lo; x < n; ++x) {
    const double term =
        -std::expm1(static_cast<double>(draws) * LogBinomialCdf(n, q, x));
    total += term;
    if (x > mean && term < 1e-16) break;
  }
  return total;
}

double BinomialMaxExceeds(int64_t n, double q, int64_t draws, int64_t limit) {
  if (limit >= n || q <= 0.0) return 0.0;
  if (limit < 0) return 1.0;
  return -std::expm1(static_cast<double>(draws) * LogBinomialCdf(n, q, limit));
}

absl::StatusOr<Recommendation> Recommend(const Requirements& req,
                                         const GoalPolicyTable& table) {
  RETURN_IF_ERROR(req.Validate());
  Recommendation rec;
  switch (req.goal) {
    case PrivacyGoal::kMitigateMia:
      rec.epsilon = table.mia_epsilon;
      break;
    case PrivacyGoal::kMitigateReconstruction:
      rec.epsilon = table.reconstruction_epsilon;
      break;
    case PrivacyGoal::kRegulatory:
      rec.epsilon = req.regulatory_epsilon;
      break;
  }

  if (!req.partition_sizes.empty()) {
    rec.partition_sizes = req.partition_sizes;
  } else {
    ASSIGN_OR_RETURN(
        rec.partition_sizes,
        partition::PartitionSizes(
            req.dataset_size, static_cast<int>(req.clients),
            req.policy_hint.value_or(partition::PartitionPolicy::kIid)));
  }
  const int64_t min_partition = *std::min_element(rec.partition_sizes.begin(),
                                                  rec.partition_sizes.end());

  const int64_t memory_batch =
      (req.memory_budget - req.model_units) / req.per_example_units;
  if (memory_batch < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "memory budget %d leaves no room for a single example",
        req.memory_budget));
  }
  rec.batch_size = std::min(memory_batch, min_partition);
  if (req.max_batch_size.has_value()) {
    rec.batch_size = std::min(rec.batch_size, *req.max_batch_size);
  }

  bool memory_forces_fixed = false;
  for (int64_t n : rec.partition_sizes) {
    const double q =
        std::min(1.0, static_cast<double>(rec.batch_size) / n);
    const int64_t draws =
        req.rounds * dpsgd::LocalSteps(n, rec.batch_size, req.local_epochs);
    const double peak = ExpectedBinomialMax(n, q, draws);
    rec.expected_poisson_peak.push_back(peak);
    rec.poisson_overrun_probability.push_back(
        BinomialMaxExceeds(n, q, draws, memory_batch));
    if (static_cast<double>(req.memory_budget) <
        static_cast<double>(req.model_units) + req.per_example_units * peak) {
      memory_forces_fixed = true;
    }
  }
  rec.accountant =
      memory_forces_fixed ? AccountantChoice::kFixedSizeRdp : req.preference;
  rec.adjacency = req.adjacency.value_or(
      rec.accountant == AccountantChoice::kFixedSizeRdp
          ? accountant::Adjacency::kReplaceOne
          : accountant::Adjacency::kAddRemove);

  for (size_t i = 0; i < rec.partition_sizes.size(); ++i) {
    const int64_t n = rec.partition_sizes[i];
    const double delta = 1.0 / static_cast<double>(n);
    rec.deltas.push_back(delta);
    const int64_t steps = accountant::AccountedSteps(
        req.accounting, req.rounds, n, rec.batch_size, req.local_epochs);
    rec.steps.push_back(steps);
    absl::StatusOr<accountant::SubsamplingScheme> scheme =
        rec.accountant == AccountantChoice::kPoissonRdp
            ? accountant::SubsamplingScheme::Poisson(
                  std::min(1.0, static_cast<double>(rec.batch_size) / n),
                  rec.adjacency)
            : accountant::SubsamplingScheme::FixedSize(rec.batch_size, n,
                                                       rec.adjacency);
    if (!scheme.ok()) return scheme.status();
    auto calibrated =
        accountant::CalibrateSigma({rec.epsilon, delta}, *scheme, steps);
    if (!calibrated.ok()) {
      return absl::Status(
          calibrated.status().code(),
          absl::StrFormat("%s (client %d); remedies: %s, %s",
                          std::string(calibrated.status().message()), i,
                          kRelaxEpsilon, kExpandPartition));
    }
    rec.sigmas.push_back(calibrated->sigma);
  }

  const double worst_overrun =
      *std::max_element(rec.poisson_overrun_probability.begin(),
                        rec.poisson_overrun_probability.end());
  if (memory_forces_fixed) {
    rec.rationale = absl::StrFormat(
        "memory budget %d cannot hold the expected largest Poisson batch; "
        "fixed-size batches of %d keep memory at %d units (Poisson overrun "
        "probability %.3g)",
        req.memory_budget, rec.batch_size,
        req.model_units + req.per_example_units * rec.batch_size,
        worst_overrun);
  } else {
    rec.rationale = absl::StrFormat(
        "memory budget %d holds the expected largest Poisson batch; using the "
        "preferred %s accountant (Poisson overrun probability %.3g)",
        req.memory_budget, AccountantName(rec.accountant), worst_overrun);
  }
  return rec;
}

fl::FederationConfig ApplyRecommendation(const fl::FederationConfig& base,
                                         const Recommendation& rec) {
  fl::FederationConfig c = base;
  c.clients = static_cast<int64_t>(rec.partition_sizes.size());
  c.batch_size = rec.batch_size;
  c.privacy.enabled = true;
  c.privacy.sampler = rec.accountant == AccountantChoice::kPoissonRdp
                          ? dpsgd::SamplerKind::kPoisson
                          : dpsgd::SamplerKind::kFixedSize;
  c.privacy.adjacency = rec.adjacency;
  c.privacy.sigmas = rec.sigmas;
  c.privacy.deltas = rec.deltas;
  c.privacy.target_epsilon = rec.epsilon;
  return c;
}

std::string AdherenceKindName(AdherenceKind kind) {
  switch (kind) {
    case AdherenceKind::kAccuracyShortfall:
      return "accuracy-shortfall";
    case AdherenceKind::kCalibrationFailure:
      return "calibration-failure";
    case AdherenceKind::kMemoryOverrun:
      return "memory-overrun";
  }
  return "unknown";
}

std::vector<AdherenceEvent> CheckAdherence(const fl::RunRecord& record,
                                           const Requirements& req,
                                           const AdherenceOptions& options) {
  std::vector<AdherenceEvent> events;
  const auto& rounds = record.rounds;
  const int64_t half = req.rounds / 2;
  const int64_t window = std::max<int64_t>(1, half);
  double best = 0.0;
  bool shortfall_reported = false;
  for (size_t r = 0; r < rounds.size(); ++r) {
    const int64_t round = rounds[r].round;
    best = std::max(best, rounds[r].accuracy);

    if (req.min_accuracy.has_value() && !shortfall_reported &&
        round > half && best < *req.min_accuracy) {
      double trend = 0.0;
      if (static_cast<int64_t>(r) >= window) {
        trend = 100.0 * (rounds[r].accuracy - rounds[r - window].accuracy) /
                static_cast<double>(window);
      }
      if (trend < options.trend_threshold_points) {
        events.push_back(
            {round, AdherenceKind::kAccuracyShortfall,
             absl::StrFormat("best accuracy %.4f after round %d is below the "
                             "required %.4f and improving %.2f points per "
                             "round",
                             best, round, *req.min_accuracy, trend),
             {kExpandPartition, kMemoryAndAccountant, kRelaxEpsilon}});
        shortfall_reported = true;
      }
    }

    std::vector<std::string> over;
    for (const auto& c : rounds[r].clients) {
      if (c.participated && c.memory_peak > req.memory_budget) {
        over.push_back(absl::StrFormat("client %d peak %d", c.client,
                                       c.memory_peak));
      }
    }
    if (!over.empty()) {
      events.push_back(
          {round, AdherenceKind::kMemoryOverrun,
           absl::StrFormat("memory budget %d exceeded: %s", req.memory_budget,
                           absl::StrJoin(over, ", ")),
           {kMemoryAndAccountant, kReduceBatch}});
    }
  }
  return events;
}

AdherenceEvent CalibrationFailureEvent(const absl::Status& status) {
  return {0, AdherenceKind::kCalibrationFailure, std::string(status.message()),
          {kRelaxEpsilon, kExpandPartition}};
}

json RequirementsToJson(const Requirements& r) {
  json j = {{"goal", GoalName(r.goal)},
            {"clients", r.clients},
            {"partition_sizes", r.partition_sizes},
            {"dataset_size", r.dataset_size},
            {"memory_budget", r.memory_budget},
            {"model_units", r.model_units},
            {"per_example_units", r.per_example_units},
            {"preference", AccountantName(r.preference)},
            {"rounds", r.rounds},
            {"local_epochs", r.local_epochs},
            {"accounting", fl::AccountingName(r.accounting)}};
  if (r.goal == PrivacyGoal::kRegulatory) {
    j["regulatory_epsilon"] = r.regulatory_epsilon;
  }
  if (r.min_accuracy.has_value()) j["min_accuracy"] = *r.min_accuracy;
  if (r.policy_hint.has_value()) {
    j["policy_hint"] = partition::PolicyName(*r.policy_hint);
  }
  if (r.max_batch_size.has_value()) j["max_batch_size"] = *r.max_batch_size;
  if (r.adjacency.has_value()) {
    j["adjacency"] = accountant::AdjacencyName(*r.adjacency);
  }
  return j;
}

absl::StatusOr<Requirements> RequirementsFromJson(const json& j) {
  Requirements r;
  ObjectReader in(j, "requirements");
  in.GetEnum("goal", r.goal, ParseGoal);
  in.Get("regulatory_epsilon", r.regulatory_epsilon);
  in.GetOptional("min_accuracy", r.min_accuracy);
  in.Get("clients", r.clients);
  in.Get("partition_sizes", r.partition_sizes);
  in.Get("dataset_size", r.dataset_size);
  if (in.Has("policy_hint") && !j.at("policy_hint").is_null()) {
    partition::PartitionPolicy hint{};
    in.GetEnum("policy_hint", hint, [](const std::string& s) {
      return partition::ParsePolicy(s);
    });
    r.policy_hint = hint;
  } else if (in.Has("policy_hint")) {
    in.Sub("policy_hint");
  }
  in.Get("memory_budget", r.memory_budget);
  in.Get("model_units", r.model_units);
  in.Get("per_example_units", r.per_example_units);
  in.GetEnum("preference", r.preference, ParseAccountant);
  in.GetOptional("max_batch_size", r.max_batch_size);
  if (in.Has("adjacency") && !j.at("adjacency").is_null()) {
    accountant::Adjacency adj{};
    in.GetEnum("adjacency", adj, [](const std::string& s) {
      return accountant::ParseAdjacency(s);
    });
    r.adjacency = adj;
  } else if (in.Has("adjacency")) {
    in.Sub("adjacency");
  }
  in.Get("rounds", r.rounds);
  in.Get("local_epochs", r.local_epochs);
  in.GetEnum("accounting", r.accounting, fl::ParseAccounting);
  RETURN_IF_ERROR(in.Finish());
  RETURN_IF_ERROR(r.Validate());
  return r;
}

json RecommendationToJson(const Recommendation& r) {
  return {{"epsilon", r.epsilon},
          {"accountant", AccountantName(r.accountant)},
          {"adjacency", accountant::AdjacencyName(r.adjacency)},
          {"batch_size", r.batch_size},
          {"partition_sizes", r.partition_sizes},
          {"deltas", r.deltas},
          {"steps", r.steps},
          {"sigmas", r.sigmas},
          {"expected_poisson_peak", r.expected_poisson_peak},
          {"poisson_overrun_probability", r.poisson_overrun_probability},
          {"rationale", r.rationale}};
}

json AdherenceEventToJson(const AdherenceEvent& e) {
  return {{"round", e.round},
          {"kind", AdherenceKindName(e.kind)},
          {"message", e.message},
          {"remedies", e.remedies}};
}

}  // namespace flip::practitioner
