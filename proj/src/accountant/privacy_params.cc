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

#include "flip/accountant/privacy_params.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace flip::accountant {

absl::Status PrivacyTarget::Validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<NoiseMultiplier> NoiseMultiplier::Create(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise multiplier must be positive and finite, got ",
                     sigma));
  }
  return NoiseMultiplier(sigma);
}

std::string AdjacencyName(Adjacency adjacency) {
  switch (adjacency) {
    case Adjacency::kAddRemove:
      return "add-remove";
    case Adjacency::kReplaceOne:
      return "replace-one";
  }
  return "unknown";
}

absl::StatusOr<Adjacency> ParseAdjacency(std::string_view name) {
  if (name == "add-remove" || name == "add_remove") return Adjacency::kAddRemove;
  if (name == "replace-one" || name == "replace_one") {
    return Adjacency::kReplaceOne;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown adjacency '", std::string(name),
                   "', expected add-remove or replace-one"));
}

absl::StatusOr<SubsamplingScheme> SubsamplingScheme::Poisson(
    double rate, Adjacency adjacency) {
  if (!(rate > 0 && rate <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Poisson rate must lie in (0, 1], got ", rate));
  }
  SubsamplingScheme scheme;
  scheme.kind_ = Kind::kPoisson;
  scheme.adjacency_ = adjacency;
  scheme.rate_ = rate;
  return scheme;
}

absl::StatusOr<SubsamplingScheme> SubsamplingScheme::FixedSize(
    int64_t batch_size, int64_t population, Adjacency adjacency) {
  if (batch_size < 1 || population < batch_size) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "fixed-size sampling needs 1 <= m <= n, got m=%d n=%d", batch_size,
        population));
  }
  SubsamplingScheme scheme;
  scheme.kind_ = Kind::kFixedSize;
  scheme.adjacency_ = adjacency;
  scheme.batch_size_ = batch_size;
  scheme.population_ = population;
  scheme.rate_ =
      static_cast<double>(batch_size) / static_cast<double>(population);
  return scheme;
}

double SubsamplingScheme::rate() const { return rate_; }

std::string SubsamplingScheme::DebugString() const {
  if (is_poisson()) {
    return absl::StrFormat("Poisson(q=%g, %s)", rate_,
                           AdjacencyName(adjacency_));
  }
  return absl::StrFormat("FixedSize(m=%d, n=%d, %s)", batch_size_, population_,
                         AdjacencyName(adjacency_));
}

}  // namespace flip::accountant
