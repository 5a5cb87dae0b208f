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

#ifndef FLIP_PARTITION_PARTITIONER_H_
#define FLIP_PARTITION_PARTITIONER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace flip::partition {

enum class PartitionPolicy { kIid, kLinear, kSquare, kExponential };

std::string PolicyName(PartitionPolicy policy);
absl::StatusOr<PartitionPolicy> ParsePolicy(std::string_view name);

// Per-client record counts. Client i (1-based) gets weight 1, i, i^2 or e^i.
// Non-IID policies floor n * w_i / sum(w) for the first k - 1 clients and give
// the remainder to the last; IID spreads n mod k over the lowest ids.
// Returns a policy-degenerate error if any client would receive no records.
absl::StatusOr<std::vector<int64_t>> PartitionSizes(int64_t n, int k,
                                                    PartitionPolicy policy);

struct PartitionPlan {
  std::vector<int64_t> sizes;
  // assignments[i] holds the record indices of client i, ascending.
  std::vector<std::vector<int64_t>> assignments;
  uint64_t seed = 0;
};

// Seeded uniform shuffle of 0..n-1 sliced by `sizes`.
absl::StatusOr<PartitionPlan> AssignIndices(int64_t n,
                                            const std::vector<int64_t>& sizes,
                                            uint64_t seed);

absl::StatusOr<PartitionPlan> MakePlan(int64_t n, int k, PartitionPolicy policy,
                                       uint64_t seed);

}  // namespace flip::partition

#endif  // FLIP_PARTITION_PARTITIONER_H_
