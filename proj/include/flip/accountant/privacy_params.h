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

#ifndef FLIP_ACCOUNTANT_PRIVACY_PARAMS_H_
#define FLIP_ACCOUNTANT_PRIVACY_PARAMS_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace flip::accountant {

// An (epsilon, delta) privacy requirement.
struct PrivacyTarget {
  double epsilon = 0;
  double delta = 0;

  absl::Status Validate() const;
};

// Noise standard deviation divided by the clipping norm.
class NoiseMultiplier {
 public:
  static absl::StatusOr<NoiseMultiplier> Create(double sigma);

  double value() const { return sigma_; }

  friend bool operator==(NoiseMultiplier a, NoiseMultiplier b) {
    return a.sigma_ == b.sigma_;
  }

 private:
  explicit NoiseMultiplier(double sigma) : sigma_(sigma) {}
  double sigma_;
};

enum class Adjacency {
  kAddRemove,
  kReplaceOne,
};

// L2 sensitivity of a clipped sum in units of the clipping norm: one record
// inserted or deleted moves the sum by at most C, one record swapped by 2C.
inline double NormalizedSensitivity(Adjacency adjacency) {
  return adjacency == Adjacency::kReplaceOne ? 2.0 : 1.0;
}

std::string AdjacencyName(Adjacency adjacency);
absl::StatusOr<Adjacency> ParseAdjacency(std::string_view name);

// How a minibatch is drawn from a population, together with the neighbouring
// relation the guarantee is stated for.
class SubsamplingScheme {
 public:
  enum class Kind { kPoisson, kFixedSize };

  // Each record enters the batch independently with probability `rate`.
  static absl::StatusOr<SubsamplingScheme> Poisson(
      double rate, Adjacency adjacency = Adjacency::kAddRemove);
  // Exactly `batch_size` records drawn without replacement from `population`.
  static absl::StatusOr<SubsamplingScheme> FixedSize(
      int64_t batch_size, int64_t population,
      Adjacency adjacency = Adjacency::kReplaceOne);

  Kind kind() const { return kind_; }
  Adjacency adjacency() const { return adjacency_; }
  bool is_poisson() const { return kind_ == Kind::kPoisson; }
  // q for Poisson, m / n for fixed-size.
  double rate() const;
  // Only meaningful for kFixedSize.
  int64_t batch_size() const { return batch_size_; }
  int64_t population() const { return population_; }

  std::string DebugString() const;

 private:
  SubsamplingScheme() = default;

  Kind kind_ = Kind::kPoisson;
  Adjacency adjacency_ = Adjacency::kAddRemove;
  double rate_ = 1.0;
  int64_t batch_size_ = 0;
  int64_t population_ = 0;
};

}  // namespace flip::accountant

#endif  // FLIP_ACCOUNTANT_PRIVACY_PARAMS_H_
