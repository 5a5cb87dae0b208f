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

#ifndef FLIP_FL_FEDERATION_H_
#define FLIP_FL_FEDERATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "flip/accountant/calibration.h"
#include "flip/accountant/privacy_params.h"
#include "flip/dpsgd/local_training.h"
#include "flip/dpsgd/model.h"
#include "flip/dpsgd/sampler.h"
#include "flip/partition/partitioner.h"

namespace flip::fl {

// Synthetic Gaussian-blob task: a training pool split across clients and a
// held-out global test split drawn from the same blobs.
struct DataSpec {
  int64_t train_size = 20000;
  int64_t test_size = 4000;
  int dim = 20;
  int classes = 2;
  double separation = 2.0;
};

struct FederationData {
  dpsgd::Dataset train;
  dpsgd::Dataset test;
};

FederationData MakeFederationData(const DataSpec& spec, uint64_t seed);

struct PrivacySpec {
  // When false every client trains with sigma = 0 and epsilon is infinite.
  bool enabled = true;
  double clip_norm = 3.0;
  dpsgd::NoiseInjection injection = dpsgd::NoiseInjection::kPerStep;
  dpsgd::SamplerKind sampler = dpsgd::SamplerKind::kPoisson;
  accountant::Adjacency adjacency = accountant::Adjacency::kAddRemove;
  accountant::AccountingConvention accounting =
      accountant::AccountingConvention::kPerStep;
  // Calibrate each client's sigma to this epsilon at its own delta.
  std::optional<double> target_epsilon;
  // Explicit noise: one value per client, or a single shared value. When a
  // target is also given, each sigma must meet it.
  std::vector<double> sigmas;
  // One per client, or a single shared value; empty means 1 / |D_i|.
  std::vector<double> deltas;
};

struct FederationConfig {
  int64_t clients = 4;
  int64_t rounds = 5;
  int64_t local_epochs = 1;
  double learning_rate = 0.5;
  int64_t batch_size = 550;
  partition::PartitionPolicy policy = partition::PartitionPolicy::kIid;
  PrivacySpec privacy;
  dpsgd::ModelSpec model{dpsgd::Architecture::kLogistic, 20, 2, 16};
  DataSpec data;
  uint64_t seed = 0;
  int parallelism = 1;       // clients trained concurrently
  int gradient_workers = 1;  // per-example gradient threads per client
  // Chooses participating client ids for a 1-based round. Unset means all.
  std::function<std::vector<int64_t>(int64_t round, int64_t clients)>
      round_filter;

  absl::Status Validate() const;
};

// Per-client privacy parameters fixed at setup.
struct ClientSetup {
  int64_t client = 0;
  int64_t partition_size = 0;
  double sigma = 0.0;
  double delta = 0.0;
  int64_t local_steps = 0;          // DP-SGD steps per round
  int64_t accounted_per_round = 0;  // releases charged per round
};

absl::StatusOr<accountant::SubsamplingScheme> ClientScheme(
    const FederationConfig& config, int64_t partition_size);

// Resolves sigma and delta for every client from the partition sizes.
absl::StatusOr<std::vector<ClientSetup>> PlanClients(
    const FederationConfig& config, std::span<const int64_t> partition_sizes);

// Cumulative epsilon after `accounted_steps` releases. Zero steps cost
// nothing; sigma = 0 is infinite.
absl::StatusOr<double> ClientEpsilon(const FederationConfig& config,
                                     const ClientSetup& setup,
                                     int64_t accounted_steps);

struct ClientRoundStats {
  int64_t client = 0;
  bool participated = true;
  int64_t steps = 0;
  int64_t skipped_steps = 0;
  int64_t min_batch = 0;
  int64_t max_batch = 0;
  double mean_batch = 0.0;
  int64_t memory_peak = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;  // global model on this client's test slice
  double epsilon = 0.0;        // cumulative
};

struct RoundMetrics {
  int64_t round = 0;  // 1-based
  double accuracy = 0.0;
  double loss = 0.0;
  std::vector<ClientRoundStats> clients;
};

struct RunRecord {
  std::vector<ClientSetup> clients;
  std::vector<RoundMetrics> rounds;
  bool aborted = false;
  std::string diagnostic;
  std::vector<double> final_parameters;

  double MaxAccuracy() const;
};

enum class ObserverAction { kContinue, kAbort };
// Called after each round. May block, which pauses the run.
using RoundObserver = std::function<ObserverAction(const RoundMetrics&)>;

// Broadcast, local DP training, FedAvg and evaluation for config.rounds
// rounds. Setup problems are returned as errors. A client failure or
// non-finite aggregate stops the run and is reported through
// RunRecord::aborted and RunRecord::diagnostic.
absl::StatusOr<RunRecord> RunFederation(const FederationConfig& config,
                                        const FederationData& data,
                                        const RoundObserver& observer = nullptr);

}  // namespace flip::fl

#endif  // FLIP_FL_FEDERATION_H_
