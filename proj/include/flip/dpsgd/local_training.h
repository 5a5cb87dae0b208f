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

#ifndef FLIP_DPSGD_LOCAL_TRAINING_H_
#define FLIP_DPSGD_LOCAL_TRAINING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "flip/dpsgd/model.h"
#include "flip/dpsgd/sampler.h"

namespace flip::dpsgd {

// kPerStep: Gaussian noise on every minibatch gradient (DP-SGD).
// kPerRound: noiseless clipped steps, then N(0, (sigma C / L)^2) added to the
// client's parameter delta once at round end.
enum class NoiseInjection { kPerStep, kPerRound };

std::string InjectionName(NoiseInjection injection);
absl::StatusOr<NoiseInjection> ParseInjection(const std::string& name);

struct LocalTrainingConfig {
  SamplerKind sampler = SamplerKind::kPoisson;
  int64_t batch_size = 1;  // L; Poisson uses rate min(1, L / n)
  int64_t local_epochs = 1;
  double learning_rate = 0.1;
  double clip_norm = 1.0;
  double sigma = 0.0;
  NoiseInjection injection = NoiseInjection::kPerStep;
  int workers = 1;
};

struct LocalTrainingResult {
  std::vector<double> parameters;
  MemoryProfile memory;
  int64_t steps = 0;
  int64_t skipped_steps = 0;
  double mean_loss = 0.0;  // over non-skipped steps
  double max_clipped_norm = 0.0;
};

// Steps per round: local_epochs * ceil(n / L).
int64_t LocalSteps(int64_t dataset_size, int64_t batch_size,
                   int64_t local_epochs);

// Trains a copy of `global` on `data` for one round. Sampling and noise
// streams are derived from (seed, client, round, step), so the result is a
// pure function of the arguments.
absl::StatusOr<LocalTrainingResult> TrainLocal(const Model& global,
                                               const Dataset& data,
                                               const LocalTrainingConfig& config,
                                               uint64_t seed, int64_t client,
                                               int64_t round);

}  // namespace flip::dpsgd

#endif  // FLIP_DPSGD_LOCAL_TRAINING_H_
