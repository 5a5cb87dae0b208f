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

#ifndef FLIP_FL_FED_AVG_H_
#define FLIP_FL_FED_AVG_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "flip/dpsgd/model.h"

namespace flip::fl {

// p_i = |D_i| / sum_j |D_j|.
absl::StatusOr<std::vector<double>> AggregationWeights(
    std::span<const int64_t> client_sizes);

// sum_i p_i w_i, reduced in client order.
absl::StatusOr<std::vector<double>> FedAvg(
    const std::vector<std::vector<double>>& client_params,
    std::span<const int64_t> client_sizes);

struct Evaluation {
  double accuracy = 0.0;  // fraction of correct argmax predictions
  double loss = 0.0;      // mean cross-entropy
};

absl::StatusOr<Evaluation> Evaluate(const dpsgd::Model& model,
                                    const dpsgd::Dataset& test_set);

}  // namespace flip::fl

#endif  // FLIP_FL_FED_AVG_H_
