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

#include "flip/fl/fed_avg.h"

#include "absl/strings/str_format.h"

namespace flip::fl {

absl::StatusOr<std::vector<double>> AggregationWeights(
    std::span<const int64_t> client_sizes) {
  if (client_sizes.empty()) {
    return absl::InvalidArgumentError("no clients to aggregate");
  }
  int64_t total = 0;
  for (int64_t s : client_sizes) {
    if (s < 1) {
      return absl::InvalidArgumentError(
          absl::StrFormat("client sizes must be positive, got %d", s));
    }
    total += s;
  }
  std::vector<double> weights;
  weights.reserve(client_sizes.size());
  for (int64_t s : client_sizes) {
    weights.push_back(static_cast<double>(s) / static_cast<double>(total));
  }
  return weights;
}

absl::StatusOr<std::vector<double>> FedAvg(
    const std::vector<std::vector<double>>& client_params,
    std::span<const int64_t> client_sizes) {
  if (client_params.size() != client_sizes.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d parameter vectors but %d client sizes", client_params.size(),
        client_sizes.size()));
  }
  auto weights = AggregationWeights(client_sizes);
  if (!weights.ok()) return weights.status();
  const size_t dim = client_params.front().size();
  for (size_t i = 1; i < client_params.size(); ++i) {
    if (client_params[i].size() != dim) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "client %d sent %d parameters, client 0 sent %d", i,
          client_params[i].size(), dim));
    }
  }
  std::vector<double> out(dim, 0.0);
  for (size_t i = 0; i < client_params.size(); ++i) {
    const double p = (*weights)[i];
    for (size_t j = 0; j < dim; ++j) out[j] += p * client_params[i][j];
  }
  return out;
}

absl::StatusOr<Evaluation> Evaluate(const dpsgd::Model& model,
                                    const dpsgd::Dataset& test_set) {
  if (test_set.size() == 0) {
    return absl::InvalidArgumentError("test set is empty");
  }
  int64_t correct = 0;
  double loss = 0;
  for (int64_t i = 0; i < test_set.size(); ++i) {
    const auto x = test_set.row(i);
    if (model.Predict(x) == test_set.labels[i]) ++correct;
    loss += model.Loss(x, test_set.labels[i]);
  }
  const double n = static_cast<double>(test_set.size());
  return Evaluation{static_cast<double>(correct) / n, loss / n};
}

}  // namespace flip::fl
