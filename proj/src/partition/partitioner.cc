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

#include "flip/partition/partitioner.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/common/status.h"

namespace flip::partition {

std::string PolicyName(PartitionPolicy policy) {
  switch (policy) {
    case PartitionPolicy::kIid:
      return "iid";
    case PartitionPolicy::kLinear:
      return "linear";
    case PartitionPolicy::kSquare:
      return "square";
    case PartitionPolicy::kExponential:
      return "exponential";
  }
  return "unknown";
}

absl::StatusOr<PartitionPolicy> ParsePolicy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "iid") return PartitionPolicy::kIid;
  if (lower == "linear") return PartitionPolicy::kLinear;
  if (lower == "square" || lower == "squared") return PartitionPolicy::kSquare;
  if (lower == "exponential") return PartitionPolicy::kExponential;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown partition policy '", lower,
      "', expected iid|linear|square|exponential"));
}

absl::StatusOr<std::vector<int64_t>> PartitionSizes(int64_t n, int k,
                                                    PartitionPolicy policy) {
  if (k < 1 || n < k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need n >= k >= 1 to partition, got n=%d k=%d", n, k));
  }
  std::vector<int64_t> sizes(k);
  if (policy == PartitionPolicy::kIid) {
    const int64_t base = n / k;
    const int64_t extra = n % k;
    for (int i = 0; i < k; ++i) sizes[i] = base + (i < extra ? 1 : 0);
    return sizes;
  }

  int64_t assigned = 0;
  if (policy == PartitionPolicy::kExponential) {
    // Shares e^i / sum_j e^j = e^(i-k) / sum_j e^(j-k), kept in range for any k.
    long double total = 0;
    for (int j = 1; j <= k; ++j) total += std::exp(static_cast<long double>(j - k));
    for (int i = 1; i < k; ++i) {
      const long double share = std::exp(static_cast<long double>(i - k)) / total;
      sizes[i - 1] = static_cast<int64_t>(std::floor(n * share));
      assigned += sizes[i - 1];
    }
  } else {
    // Integer weights: exact floor(n * w_i / W).
    auto weight = [policy](int64_t i) {
      return policy == PartitionPolicy::kLinear ? i : i * i;
    };
    __int128 total = 0;
    for (int j = 1; j <= k; ++j) total += weight(j);
    for (int i = 1; i < k; ++i) {
      sizes[i - 1] = static_cast<int64_t>(static_cast<__int128>(n) * weight(i) / total);
      assigned += sizes[i - 1];
    }
  }
  sizes[k - 1] = n - assigned;

  for (int i = 0; i < k; ++i) {
    if (sizes[i] <= 0) {
      return PolicyDegenerateError(absl::StrFormat(
          "%s policy leaves client %d of %d with no records (n=%d)",
          PolicyName(policy), i + 1, k, n));
    }
  }
  return sizes;
}

absl::StatusOr<PartitionPlan> AssignIndices(int64_t n,
                                            const std::vector<int64_t>& sizes,
                                            uint64_t seed) {
  if (n < 0) return absl::InvalidArgumentError("n must be nonnegative");
  int64_t total = 0;
  for (int64_t s : sizes) {
    if (s < 0) return absl::InvalidArgumentError("negative partition size");
    total += s;
  }
  if (total != n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "partition sizes sum to %d but the dataset has %d records", total, n));
  }

  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int64_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int64_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }

  PartitionPlan plan;
  plan.sizes = sizes;
  plan.seed = seed;
  plan.assignments.reserve(sizes.size());
  auto it = order.begin();
  for (int64_t s : sizes) {
    std::vector<int64_t> part(it, it + s);
    std::sort(part.begin(), part.end());
    plan.assignments.push_back(std::move(part));
    it += s;
  }
  return plan;
}

absl::StatusOr<PartitionPlan> MakePlan(int64_t n, int k, PartitionPolicy policy,
                                       uint64_t seed) {
  ASSIGN_OR_RETURN(std::vector<int64_t> sizes, PartitionSizes(n, k, policy));
  return AssignIndices(n, sizes, seed);
}

}  // namespace flip::partition
