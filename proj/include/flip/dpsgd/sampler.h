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

#ifndef FLIP_DPSGD_SAMPLER_H_
#define FLIP_DPSGD_SAMPLER_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace flip::dpsgd {

enum class SamplerKind { kPoisson, kFixedSize };

std::string SamplerName(SamplerKind kind);
absl::StatusOr<SamplerKind> ParseSampler(const std::string& name);

// Draws minibatch index sets from 0..n-1.
class MinibatchSampler {
 public:
  // Each index is included independently with probability `rate`.
  static absl::StatusOr<MinibatchSampler> Poisson(double rate);
  // Exactly `batch_size` indices, uniformly without replacement.
  static absl::StatusOr<MinibatchSampler> FixedSize(int64_t batch_size);

  SamplerKind kind() const { return kind_; }
  double rate() const { return rate_; }
  int64_t batch_size() const { return batch_size_; }

  // Sorted indices. Fails for a fixed-size sampler when batch_size > n.
  absl::StatusOr<std::vector<int64_t>> Sample(int64_t n,
                                              std::mt19937_64& rng) const;

 private:
  MinibatchSampler(SamplerKind kind, double rate, int64_t batch_size)
      : kind_(kind), rate_(rate), batch_size_(batch_size) {}

  SamplerKind kind_;
  double rate_;
  int64_t batch_size_;
};

// Abstract memory model: base + per_example * batch_size units.
struct MemoryModel {
  int64_t base_units = 0;
  int64_t per_example_units = 1;

  int64_t Units(int64_t batch_size) const {
    return base_units + per_example_units * batch_size;
  }
};

struct MemoryProfile {
  MemoryModel model;
  std::vector<int64_t> batch_sizes;
  int64_t peak_units = 0;

  void Record(int64_t batch_size);
  double MeanBatchSize() const;
  // Unbiased sample variance of the recorded batch sizes.
  double BatchSizeVariance() const;
};

struct MinibatchSchedule {
  std::vector<std::vector<int64_t>> batches;
  MemoryProfile profile;
};

absl::StatusOr<MinibatchSchedule> SampleMinibatches(
    const MinibatchSampler& sampler, int64_t n, int64_t steps,
    std::mt19937_64& rng, const MemoryModel& memory = {});

}  // namespace flip::dpsgd

#endif  // FLIP_DPSGD_SAMPLER_H_
