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

#include "flip/dpsgd/sampler.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace flip::dpsgd {

std::string SamplerName(SamplerKind kind) {
  return kind == SamplerKind::kPoisson ? "poisson" : "fixed";
}

absl::StatusOr<SamplerKind> ParseSampler(const std::string& name) {
  if (name == "poisson") return SamplerKind::kPoisson;
  if (name == "fixed" || name == "fixed-size") return SamplerKind::kFixedSize;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sampler '", name, "', expected poisson|fixed"));
}

absl::StatusOr<MinibatchSampler> MinibatchSampler::Poisson(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1], got %g", rate));
  }
  return MinibatchSampler(SamplerKind::kPoisson, rate, 0);
}

absl::StatusOr<MinibatchSampler> MinibatchSampler::FixedSize(
    int64_t batch_size) {
  if (batch_size < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("batch size must be >= 1, got %d", batch_size));
  }
  return MinibatchSampler(SamplerKind::kFixedSize, 0.0, batch_size);
}

absl::StatusOr<std::vector<int64_t>> MinibatchSampler::Sample(
    int64_t n, std::mt19937_64& rng) const {
  if (n < 0) return absl::InvalidArgumentError("population must be >= 0");
  std::vector<int64_t> out;
  if (kind_ == SamplerKind::kPoisson) {
    if (rate_ >= 1.0) {
      out.resize(n);
      for (int64_t i = 0; i < n; ++i) out[i] = i;
      return out;
    }
    // Gaps between successive inclusions are geometric.
    std::geometric_distribution<int64_t> gap(rate_);
    out.reserve(static_cast<size_t>(n * rate_ * 1.2) + 8);
    for (int64_t i = gap(rng); i < n; i += gap(rng) + 1) out.push_back(i);
    return out;
  }

  if (batch_size_ > n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "fixed-size batch %d exceeds population %d", batch_size_, n));
  }
  // Floyd's algorithm.
  std::unordered_set<int64_t> chosen;
  chosen.reserve(batch_size_ * 2);
  for (int64_t j = n - batch_size_; j < n; ++j) {
    const int64_t t = std::uniform_int_distribution<int64_t>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

void MemoryProfile::Record(int64_t batch_size) {
  batch_sizes.push_back(batch_size);
  peak_units = std::max(peak_units, model.Units(batch_size));
}

double MemoryProfile::MeanBatchSize() const {
  if (batch_sizes.empty()) return 0.0;
  double sum = 0;
  for (int64_t b : batch_sizes) sum += static_cast<double>(b);
  return sum / static_cast<double>(batch_sizes.size());
}

double MemoryProfile::BatchSizeVariance() const {
  if (batch_sizes.size() < 2) return 0.0;
  const double mean = MeanBatchSize();
  double ss = 0;
  for (int64_t b : batch_sizes) {
    const double d = static_cast<double>(b) - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(batch_sizes.size() - 1);
}

absl::StatusOr<MinibatchSchedule> SampleMinibatches(
    const MinibatchSampler& sampler, int64_t n, int64_t steps,
    std::mt19937_64& rng, const MemoryModel& memory) {
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("steps must be >= 1, got %d", steps));
  }
  MinibatchSchedule schedule;
  schedule.profile.model = memory;
  schedule.batches.reserve(steps);
  for (int64_t s = 0; s < steps; ++s) {
    auto batch = sampler.Sample(n, rng);
    if (!batch.ok()) return batch.status();
    schedule.profile.Record(static_cast<int64_t>(batch->size()));
    schedule.batches.push_back(*std::move(batch));
  }
  return schedule;
}

}  // namespace flip::dpsgd
