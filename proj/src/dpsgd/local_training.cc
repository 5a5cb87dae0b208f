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

#include "flip/dpsgd/local_training.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/rng.h"
#include "flip/common/status.h"
#include "flip/dpsgd/dp_sgd.h"

namespace flip::dpsgd {

std::string InjectionName(NoiseInjection injection) {
  return injection == NoiseInjection::kPerStep ? "per-step" : "per-round";
}

absl::StatusOr<NoiseInjection> ParseInjection(const std::string& name) {
  if (name == "per-step") return NoiseInjection::kPerStep;
  if (name == "per-round") return NoiseInjection::kPerRound;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown injection mode '", name, "', expected per-step|per-round"));
}

int64_t LocalSteps(int64_t dataset_size, int64_t batch_size,
                   int64_t local_epochs) {
  return local_epochs * ((dataset_size + batch_size - 1) / batch_size);
}

absl::StatusOr<LocalTrainingResult> TrainLocal(const Model& global,
                                               const Dataset& data,
                                               const LocalTrainingConfig& config,
                                               uint64_t seed, int64_t client,
                                               int64_t round) {
  const int64_t n = data.size();
  if (n < 1) return absl::InvalidArgumentError("client dataset is empty");
  if (config.batch_size < 1 || config.local_epochs < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "batch size and local epochs must be >= 1, got %d and %d",
        config.batch_size, config.local_epochs));
  }

  MinibatchSampler sampler = *MinibatchSampler::Poisson(1.0);
  double normalizer = 0;
  if (config.sampler == SamplerKind::kPoisson) {
    const double rate = std::min(
        1.0, static_cast<double>(config.batch_size) / static_cast<double>(n));
    ASSIGN_OR_RETURN(sampler, MinibatchSampler::Poisson(rate));
    normalizer = rate * static_cast<double>(n);
  } else {
    if (config.batch_size > n) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "client %d holds %d records, fewer than the fixed batch size %d",
          client, n, config.batch_size));
    }
    ASSIGN_OR_RETURN(sampler, MinibatchSampler::FixedSize(config.batch_size));
    normalizer = static_cast<double>(config.batch_size);
  }

  ASSIGN_OR_RETURN(Model model,
                   Model::Create(global.spec(),
                                 std::vector<double>(global.parameters().begin(),
                                                     global.parameters().end())));
  StepOptions options;
  options.clip_norm = config.clip_norm;
  options.sigma =
      config.injection == NoiseInjection::kPerStep ? config.sigma : 0.0;
  options.learning_rate = config.learning_rate;
  options.normalizer = normalizer;
  options.workers = config.workers;

  LocalTrainingResult result;
  result.memory.model = MemoryModel{model.size(), 1};
  result.steps = LocalSteps(n, config.batch_size, config.local_epochs);
  double loss_sum = 0;
  int64_t trained = 0;
  for (int64_t step = 0; step < result.steps; ++step) {
    std::mt19937_64 sample_rng(
        DeriveSeed(seed, Stream::kSampling, client, round, step));
    std::mt19937_64 noise_rng(
        DeriveSeed(seed, Stream::kNoise, client, round, step));
    ASSIGN_OR_RETURN(std::vector<int64_t> batch, sampler.Sample(n, sample_rng));
    result.memory.Record(static_cast<int64_t>(batch.size()));
    auto report = NoisyStep(model, data, batch, options, noise_rng);
    if (!report.ok()) {
      return absl::Status(
          report.status().code(),
          absl::StrFormat("%s (client %d, round %d, step %d)",
                          std::string(report.status().message()), client,
                          round, step));
    }
    if (report->skipped) {
      ++result.skipped_steps;
      continue;
    }
    ++trained;
    loss_sum += report->mean_loss;
    result.max_clipped_norm =
        std::max(result.max_clipped_norm, report->max_clipped_norm);
  }
  result.mean_loss = trained > 0 ? loss_sum / static_cast<double>(trained) : 0;

  result.parameters.assign(model.parameters().begin(),
                           model.parameters().end());
  if (config.injection == NoiseInjection::kPerRound && config.sigma > 0.0) {
    const auto w0 = global.parameters();
    std::vector<double> delta(result.parameters.size());
    for (size_t j = 0; j < delta.size(); ++j) {
      delta[j] = result.parameters[j] - w0[j];
    }
    std::mt19937_64 rng(DeriveSeed(seed, Stream::kRoundNoise, client, round));
    RETURN_IF_ERROR(PerRoundInject(delta, config.sigma, config.clip_norm,
                                   config.batch_size, rng));
    for (size_t j = 0; j < delta.size(); ++j) {
      result.parameters[j] = w0[j] + delta[j];
    }
  }
  for (double v : result.parameters) {
    if (!std::isfinite(v)) {
      return NumericalFailureError(absl::StrFormat(
          "client %d round %d produced non-finite parameters", client, round));
    }
  }
  return result;
}

}  // namespace flip::dpsgd
