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

#ifndef FLIP_DPSGD_DP_SGD_H_
#define FLIP_DPSGD_DP_SGD_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "flip/dpsgd/model.h"

namespace flip::dpsgd {

// Scales `g` in place by 1 / max(1, |g|_2 / clip_norm). Returns the norm of
// the clipped vector.
absl::StatusOr<double> ClipInPlace(std::span<double> g, double clip_norm);
absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double clip_norm);

struct StepOptions {
  double clip_norm = 1.0;
  double sigma = 0.0;  // noise std is sigma * clip_norm
  double learning_rate = 0.1;
  // Divisor L of the noisy sum. Defaults to the realized batch size; Poisson
  // training passes the expected batch size instead.
  std::optional<double> normalizer;
  // Threads computing per-example gradients. Reduction order is fixed, so the
  // result does not depend on this value.
  int workers = 1;
};

struct StepReport {
  int64_t batch_size = 0;
  bool skipped = false;  // empty batch
  double mean_loss = 0.0;
  double max_clipped_norm = 0.0;
};

// (1 / L) * (sum_i clip(grad_i) + N(0, sigma^2 C^2 I)). An empty batch yields
// an empty vector and report.skipped = true.
absl::StatusOr<std::vector<double>> NoisyGradient(
    const Model& model, const Dataset& data, std::span<const int64_t> batch,
    const StepOptions& options, std::mt19937_64& noise_rng,
    StepReport* report = nullptr);

// One DP-SGD update w <- w - lr * NoisyGradient. Empty batches leave the
// model untouched. Non-finite parameters after the update are a numerical
// failure.
absl::StatusOr<StepReport> NoisyStep(Model& model, const Dataset& data,
                                     std::span<const int64_t> batch,
                                     const StepOptions& options,
                                     std::mt19937_64& noise_rng);

// Adds N(0, (sigma * clip_norm / batch_size)^2) to each coordinate.
absl::Status PerRoundInject(std::span<double> update, double sigma,
                            double clip_norm, int64_t batch_size,
                            std::mt19937_64& rng);

}  // namespace flip::dpsgd

#endif  // FLIP_DPSGD_DP_SGD_H_
