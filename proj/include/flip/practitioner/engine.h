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

#ifndef FLIP_PRACTITIONER_ENGINE_H_
#define FLIP_PRACTITIONER_ENGINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "flip/accountant/calibration.h"
#include "flip/accountant/privacy_params.h"
#include "flip/fl/federation.h"
#include "flip/partition/partitioner.h"
#include "json.hpp"

namespace flip::practitioner {

enum class PrivacyGoal { kMitigateMia, kMitigateReconstruction, kRegulatory };

std::string GoalName(PrivacyGoal goal);
absl::StatusOr<PrivacyGoal> ParseGoal(const std::string& name);

// Editable goal -> epsilon map. The defaults are policy, not derived values.
struct GoalPolicyTable {
  double mia_epsilon = 6.0;
  double reconstruction_epsilon = 10.0;

  nlohmann::json ToJson() const;
  static absl::StatusOr<GoalPolicyTable> FromJson(const nlohmann::json& j);
  static absl::StatusOr<GoalPolicyTable> Load(const std::string& path);
};

enum class AccountantChoice { kPoissonRdp, kFixedSizeRdp };

std::string AccountantName(AccountantChoice choice);
absl::StatusOr<AccountantChoice> ParseAccountant(const std::string& name);

struct Requirements {
  PrivacyGoal goal = PrivacyGoal::kMitigateReconstruction;
  double regulatory_epsilon = 0.0;  // kRegulatory only
  std::optional<double> min_accuracy;

  int64_t clients = 4;
  // Either explicit partition sizes, or a dataset size split by the policy
  // hint (IID when no hint is given).
  std::vector<int64_t> partition_sizes;
  int64_t dataset_size = 0;
  std::optional<partition::PartitionPolicy> policy_hint;

  // Per-client memory budget in abstract units: model_units + per_example *
  // batch must fit.
  int64_t memory_budget = 0;
  int64_t model_units = 0;
  int64_t per_example_units = 1;

  // Accountant used when memory does not force fixed-size batches.
  AccountantChoice preference = AccountantChoice::kPoissonRdp;
  std::optional<int64_t> max_batch_size;
  std::optional<accountant::Adjacency> adjacency;

  int64_t rounds = 5;
  int64_t local_epochs = 1;
  accountant::AccountingConvention accounting =
      accountant::AccountingConvention::kPerStep;

  absl::Status Validate() const;
};

struct Recommendation {
  double epsilon = 0.0;
  AccountantChoice accountant = AccountantChoice::kPoissonRdp;
  accountant::Adjacency adjacency = accountant::Adjacency::kAddRemove;
  int64_t batch_size = 0;
  std::vector<int64_t> partition_sizes;
  std::vector<double> deltas;  // 1 / |D_i|
  std::vector<int64_t> steps;  // accounted releases per client
  std::vector<double> sigmas;
  // Expected largest Poisson batch over the run at rate L / |D_i|.
  std::vector<double> expected_poisson_peak;
  // P(some Poisson batch exceeds the budget-implied batch) per client.
  std::vector<double> poisson_overrun_probability;
  std::string rationale;
};

// Maps requirements to (epsilon, delta, accountant, L, sigma_i). Calibration
// failures keep their status kind and gain remediation text.
absl::StatusOr<Recommendation> Recommend(const Requirements& requirements,
                                         const GoalPolicyTable& table = {});

// E[max of `draws` iid Binomial(n, q)].
double ExpectedBinomialMax(int64_t n, double q, int64_t draws);
// P(max of `draws` iid Binomial(n, q) > limit).
double BinomialMaxExceeds(int64_t n, double q, int64_t draws, int64_t limit);

// Federation config that runs `rec` on top of `base`.
fl::FederationConfig ApplyRecommendation(const fl::FederationConfig& base,
                                         const Recommendation& rec);

enum class AdherenceKind { kAccuracyShortfall, kCalibrationFailure,
                           kMemoryOverrun };

std::string AdherenceKindName(AdherenceKind kind);

struct AdherenceEvent {
  int64_t round = 0;
  AdherenceKind kind = AdherenceKind::kAccuracyShortfall;
  std::string message;
  std::vector<std::string> remedies;
};

struct AdherenceOptions {
  // Shortfall requires average improvement per round below this many
  // accuracy points over the trailing half of the run.
  double trend_threshold_points = 0.5;
};

// Accuracy shortfall (once, at the first qualifying round) and memory
// overruns (once per offending round) for a run in progress or complete.
std::vector<AdherenceEvent> CheckAdherence(
    const fl::RunRecord& record, const Requirements& requirements,
    const AdherenceOptions& options = {});

AdherenceEvent CalibrationFailureEvent(const absl::Status& status);

nlohmann::json RequirementsToJson(const Requirements& r);
absl::StatusOr<Requirements> RequirementsFromJson(const nlohmann::json& j);
nlohmann::json RecommendationToJson(const Recommendation& r);
nlohmann::json AdherenceEventToJson(const AdherenceEvent& e);

}  // namespace flip::practitioner

#endif  // FLIP_PRACTITIONER_ENGINE_H_
