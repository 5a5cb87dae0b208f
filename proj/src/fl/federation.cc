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

#include "flip/fl/federation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/rng.h"
#include "flip/common/status.h"
#include "flip/fl/fed_avg.h"

namespace flip::fl {
namespace {

using accountant::SubsamplingScheme;

absl::Status CheckPerClientList(const std::vector<double>& values,
                                int64_t clients, const char* name) {
  if (values.empty() || values.size() == 1 ||
      static_cast<int64_t>(values.size()) == clients) {
    return absl::OkStatus();
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("privacy.%s needs 1 or %d entries, got %d", name,
                      clients, values.size()));
}

double PerClient(const std::vector<double>& values, int64_t client) {
  return values.size() == 1 ? values[0] : values[client];
}

// Contiguous slices of the test split, sized by the partition policy when it
// yields no empty slice and evenly otherwise.
std::vector<dpsgd::Dataset> SplitTestSet(const dpsgd::Dataset& test,
                                         int64_t clients,
                                         partition::PartitionPolicy policy) {
  std::vector<dpsgd::Dataset> out;
  if (test.size() < clients) return out;
  auto sizes = partition::PartitionSizes(test.size(), static_cast<int>(clients),
                                         policy);
  if (!sizes.ok()) {
    sizes = partition::PartitionSizes(test.size(), static_cast<int>(clients),
                                      partition::PartitionPolicy::kIid);
  }
  int64_t begin = 0;
  for (int64_t s : *sizes) {
    std::vector<int64_t> idx(s);
    for (int64_t j = 0; j < s; ++j) idx[j] = begin + j;
    out.push_back(test.Subset(idx));
    begin += s;
  }
  return out;
}

}  // namespace

FederationData MakeFederationData(const DataSpec& spec, uint64_t seed) {
  dpsgd::Dataset all = dpsgd::MakeBlobs(
      {spec.train_size + spec.test_size, spec.dim, spec.classes,
       spec.separation, DeriveSeed(seed, Stream::kData, 0, 0)});
  std::vector<int64_t> train_idx(spec.train_size);
  std::vector<int64_t> test_idx(spec.test_size);
  for (int64_t i = 0; i < spec.train_size; ++i) train_idx[i] = i;
  for (int64_t i = 0; i < spec.test_size; ++i) {
    test_idx[i] = spec.train_size + i;
  }
  return {all.Subset(train_idx), all.Subset(test_idx)};
}

absl::Status FederationConfig::Validate() const {
  if (clients < 1 || rounds < 1 || local_epochs < 1 || batch_size < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "clients, rounds, local_epochs and batch_size must be >= 1 (got %d, "
        "%d, %d, %d)",
        clients, rounds, local_epochs, batch_size));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    return absl::InvalidArgumentError("learning_rate must be positive");
  }
  if (parallelism < 1 || gradient_workers < 1) {
    return absl::InvalidArgumentError(
        "parallelism and gradient_workers must be >= 1");
  }
  if (data.train_size < clients) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "train_size %d is smaller than the client count %d", data.train_size,
        clients));
  }
  if (data.test_size < 1) {
    return absl::InvalidArgumentError("test_size must be >= 1");
  }
  if (data.dim != model.dim || data.classes != model.classes) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "model shape (dim=%d, classes=%d) does not match data (dim=%d, "
        "classes=%d)",
        model.dim, model.classes, data.dim, data.classes));
  }
  if (!(privacy.clip_norm > 0.0) || !std::isfinite(privacy.clip_norm)) {
    return absl::InvalidArgumentError("clip_norm must be positive");
  }
  RETURN_IF_ERROR(CheckPerClientList(privacy.sigmas, clients, "sigmas"));
  RETURN_IF_ERROR(CheckPerClientList(privacy.deltas, clients, "deltas"));
  for (double s : privacy.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      return absl::InvalidArgumentError("sigmas must be finite and >= 0");
    }
  }
  for (double d : privacy.deltas) {
    if (!(d > 0.0 && d < 1.0)) {
      return absl::InvalidArgumentError("deltas must lie in (0, 1)");
    }
  }
  if (privacy.target_epsilon.has_value() && !(*privacy.target_epsilon > 0.0)) {
    return absl::InvalidArgumentError("target_epsilon must be positive");
  }
  if (privacy.enabled && privacy.sigmas.empty() &&
      !privacy.target_epsilon.has_value()) {
    return absl::InvalidArgumentError(
        "privacy is enabled but neither sigmas nor target_epsilon is set");
  }
  return absl::OkStatus();
}

absl::StatusOr<SubsamplingScheme> ClientScheme(const FederationConfig& config,
                                               int64_t partition_size) {
  if (config.privacy.sampler == dpsgd::SamplerKind::kPoisson) {
    const double rate = std::min(1.0, static_cast<double>(config.batch_size) /
                                          static_cast<double>(partition_size));
    return SubsamplingScheme::Poisson(rate, config.privacy.adjacency);
  }
  return SubsamplingScheme::FixedSize(config.batch_size, partition_size,
                                      config.privacy.adjacency);
}

absl::StatusOr<std::vector<ClientSetup>> PlanClients(
    const FederationConfig& config, std::span<const int64_t> partition_sizes) {
  RETURN_IF_ERROR(config.Validate());
  if (static_cast<int64_t>(partition_sizes.size()) != config.clients) {
    return absl::InvalidArgumentError("partition count differs from clients");
  }
  const auto& privacy = config.privacy;
  std::vector<ClientSetup> setups;
  for (int64_t i = 0; i < config.clients; ++i) {
    ClientSetup s;
    s.client = i;
    s.partition_size = partition_sizes[i];
    if (privacy.sampler == dpsgd::SamplerKind::kFixedSize &&
        s.partition_size < config.batch_size) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "client %d holds %d records, fewer than the fixed batch size %d", i,
          s.partition_size, config.batch_size));
    }
    s.local_steps = dpsgd::LocalSteps(s.partition_size, config.batch_size,
                                      config.local_epochs);
    s.accounted_per_round = accountant::AccountedSteps(
        privacy.accounting, 1, s.partition_size, config.batch_size,
        config.local_epochs);
    s.delta = privacy.deltas.empty()
                  ? 1.0 / static_cast<double>(s.partition_size)
                  : PerClient(privacy.deltas, i);
    if (privacy.enabled) {
      ASSIGN_OR_RETURN(SubsamplingScheme scheme,
                       ClientScheme(config, s.partition_size));
      const int64_t total = config.rounds * s.accounted_per_round;
      if (!privacy.sigmas.empty()) {
        s.sigma = PerClient(privacy.sigmas, i);
        if (privacy.target_epsilon.has_value()) {
          if (s.sigma == 0.0) {
            return absl::FailedPreconditionError(absl::StrFormat(
                "client %d: sigma = 0 cannot meet epsilon %g", i,
                *privacy.target_epsilon));
          }
          ASSIGN_OR_RETURN(accountant::DpConversion spent,
                           accountant::EpsilonForSigma(s.sigma, scheme, total,
                                                       s.delta));
          if (spent.epsilon > *privacy.target_epsilon) {
            return absl::FailedPreconditionError(absl::StrFormat(
                "client %d: sigma %g spends epsilon %g over %d steps, above "
                "the target %g",
                i, s.sigma, spent.epsilon, total, *privacy.target_epsilon));
          }
        }
      } else {
        auto calibrated = accountant::CalibrateSigma(
            {*privacy.target_epsilon, s.delta}, scheme, total);
        if (!calibrated.ok()) {
          return absl::Status(
              calibrated.status().code(),
              absl::StrFormat("%s (client %d)",
                              std::string(calibrated.status().message()), i));
        }
        s.sigma = calibrated->sigma;
      }
    }
    setups.push_back(s);
  }
  return setups;
}

absl::StatusOr<double> ClientEpsilon(const FederationConfig& config,
                                     const ClientSetup& setup,
                                     int64_t accounted_steps) {
  if (accounted_steps == 0) return 0.0;
  if (setup.sigma == 0.0) return std::numeric_limits<double>::infinity();
  ASSIGN_OR_RETURN(SubsamplingScheme scheme,
                   ClientScheme(config, setup.partition_size));
  ASSIGN_OR_RETURN(accountant::DpConversion spent,
                   accountant::EpsilonForSigma(setup.sigma, scheme,
                                               accounted_steps, setup.delta));
  return spent.epsilon;
}

double RunRecord::MaxAccuracy() const {
  double best = 0.0;
  for (const auto& r : rounds) best = std::max(best, r.accuracy);
  return best;
}

absl::StatusOr<RunRecord> RunFederation(const FederationConfig& config,
                                        const FederationData& data,
                                        const RoundObserver& observer) {
  RETURN_IF_ERROR(config.Validate());
  if (data.train.dim != config.model.dim || data.test.size() == 0) {
    return absl::InvalidArgumentError(
        "federation data does not match the model or has no test split");
  }
  const int64_t k = config.clients;
  ASSIGN_OR_RETURN(
      partition::PartitionPlan plan,
      partition::MakePlan(data.train.size(), static_cast<int>(k), config.policy,
                          DeriveSeed(config.seed, Stream::kPartition, 0, 0)));
  RunRecord record;
  ASSIGN_OR_RETURN(record.clients, PlanClients(config, plan.sizes));

  std::vector<dpsgd::Dataset> client_data;
  client_data.reserve(k);
  for (const auto& idx : plan.assignments) {
    client_data.push_back(data.train.Subset(idx));
  }
  const std::vector<dpsgd::Dataset> client_tests =
      SplitTestSet(data.test, k, config.policy);

  ASSIGN_OR_RETURN(dpsgd::Model global,
                   dpsgd::Model::Initialize(
                       config.model,
                       DeriveSeed(config.seed, Stream::kModelInit, 0, 0)));
  std::vector<int64_t> accounted(k, 0);

  for (int64_t round = 1; round <= config.rounds; ++round) {
    std::vector<int64_t> active;
    if (config.round_filter) {
      active = config.round_filter(round, k);
      std::sort(active.begin(), active.end());
      active.erase(std::unique(active.begin(), active.end()), active.end());
      if (active.empty() || active.front() < 0 || active.back() >= k) {
        record.aborted = true;
        record.diagnostic = absl::StrFormat(
            "round %d: round filter selected no valid clients", round);
        break;
      }
    } else {
      active.resize(k);
      for (int64_t i = 0; i < k; ++i) active[i] = i;
    }

    std::vector<absl::StatusOr<dpsgd::LocalTrainingResult>> results(
        active.size(), absl::UnknownError("not run"));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t a = next++; a < active.size(); a = next++) {
        const int64_t i = active[a];
        const ClientSetup& setup = record.clients[i];
        dpsgd::LocalTrainingConfig local;
        local.sampler = config.privacy.sampler;
        local.batch_size = config.batch_size;
        local.local_epochs = config.local_epochs;
        local.learning_rate = config.learning_rate;
        local.clip_norm = config.privacy.clip_norm;
        local.sigma = setup.sigma;
        local.injection = config.privacy.injection;
        local.workers = config.gradient_workers;
        results[a] = dpsgd::TrainLocal(global, client_data[i], local,
                                       config.seed, i, round);
      }
    };
    const int threads = static_cast<int>(
        std::min<int64_t>(config.parallelism, active.size()));
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    std::vector<std::vector<double>> params;
    std::vector<int64_t> sizes;
    for (size_t a = 0; a < active.size(); ++a) {
      if (!results[a].ok()) {
        record.aborted = true;
        record.diagnostic = std::string(results[a].status().message());
        break;
      }
      params.push_back(results[a]->parameters);
      sizes.push_back(record.clients[active[a]].partition_size);
    }
    if (record.aborted) break;

    ASSIGN_OR_RETURN(std::vector<double> aggregate, FedAvg(params, sizes));
    if (!std::all_of(aggregate.begin(), aggregate.end(),
                     [](double v) { return std::isfinite(v); })) {
      record.aborted = true;
      record.diagnostic = absl::StrFormat(
          "round %d: aggregated parameters are non-finite", round);
      break;
    }
    std::copy(aggregate.begin(), aggregate.end(),
              global.mutable_parameters().begin());

    RoundMetrics metrics;
    metrics.round = round;
    ASSIGN_OR_RETURN(Evaluation eval, Evaluate(global, data.test));
    metrics.accuracy = eval.accuracy;
    metrics.loss = eval.loss;
    metrics.clients.resize(k);
    for (int64_t i = 0; i < k; ++i) {
      metrics.clients[i].client = i;
      metrics.clients[i].participated = false;
    }
    for (size_t a = 0; a < active.size(); ++a) {
      const int64_t i = active[a];
      const auto& res = *results[a];
      auto& stats = metrics.clients[i];
      stats.participated = true;
      stats.steps = res.steps;
      stats.skipped_steps = res.skipped_steps;
      const auto& sizes_seen = res.memory.batch_sizes;
      stats.min_batch = *std::min_element(sizes_seen.begin(), sizes_seen.end());
      stats.max_batch = *std::max_element(sizes_seen.begin(), sizes_seen.end());
      stats.mean_batch = res.memory.MeanBatchSize();
      stats.memory_peak = res.memory.peak_units;
      stats.train_loss = res.mean_loss;
      accounted[i] += record.clients[i].accounted_per_round;
    }
    for (int64_t i = 0; i < k; ++i) {
      auto& stats = metrics.clients[i];
      ASSIGN_OR_RETURN(stats.epsilon,
                       ClientEpsilon(config, record.clients[i], accounted[i]));
      if (!client_tests.empty()) {
        ASSIGN_OR_RETURN(Evaluation local_eval,
                         Evaluate(global, client_tests[i]));
        stats.test_accuracy = local_eval.accuracy;
      }
    }
    record.rounds.push_back(std::move(metrics));
    if (observer && observer(record.rounds.back()) == ObserverAction::kAbort) {
      record.aborted = true;
      record.diagnostic = absl::StrFormat("aborted by request after round %d",
                                          round);
      break;
    }
  }
  record.final_parameters.assign(global.parameters().begin(),
                                 global.parameters().end());
  return record;
}

}  // namespace flip::fl
