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

#ifndef FLIP_DPSGD_MODEL_H_
#define FLIP_DPSGD_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace flip::dpsgd {

// Dense classification data, features stored row-major.
struct Dataset {
  int dim = 0;
  int classes = 0;
  std::vector<double> features;
  std::vector<int> labels;

  int64_t size() const { return static_cast<int64_t>(labels.size()); }
  std::span<const double> row(int64_t i) const {
    return {features.data() + i * dim, static_cast<size_t>(dim)};
  }
  Dataset Subset(std::span<const int64_t> indices) const;
};

// Seeded Gaussian blobs: class c is centred at separation * u_c for a random
// unit vector u_c, with identity covariance. Labels cycle through classes so
// the set is balanced.
struct BlobSpec {
  int64_t n = 1000;
  int dim = 2;
  int classes = 2;
  double separation = 3.0;
  uint64_t seed = 0;
};
Dataset MakeBlobs(const BlobSpec& spec);

enum class Architecture { kLogistic, kMlp };

std::string ArchitectureName(Architecture arch);
absl::StatusOr<Architecture> ParseArchitecture(const std::string& name);

struct ModelSpec {
  Architecture architecture = Architecture::kLogistic;
  int dim = 2;
  int classes = 2;
  int hidden = 16;  // kMlp only

  int64_t ParameterCount() const;
};

// Multinomial logistic regression or a one-hidden-layer tanh MLP with a
// softmax output and cross-entropy loss, over a flat parameter vector.
//
// Layouts: logistic [W (c x d), b (c)]; MLP [W1 (h x d), b1 (h), W2 (c x h),
// b2 (c)], all row-major.
class Model {
 public:
  static absl::StatusOr<Model> Create(const ModelSpec& spec,
                                      std::vector<double> parameters);
  // Logistic starts at zero; the MLP draws W1 and W2 from N(0, 1/fan_in).
  static absl::StatusOr<Model> Initialize(const ModelSpec& spec, uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  std::span<const double> parameters() const { return parameters_; }
  std::span<double> mutable_parameters() { return parameters_; }
  int64_t size() const { return static_cast<int64_t>(parameters_.size()); }
  bool AllFinite() const;

  // Cross-entropy loss of one example; writes d loss / d params into `grad`
  // (overwritten, size() entries).
  double LossAndGradient(std::span<const double> x, int label,
                         std::span<double> grad) const;
  double Loss(std::span<const double> x, int label) const;
  int Predict(std::span<const double> x) const;

 private:
  Model(ModelSpec spec, std::vector<double> parameters)
      : spec_(spec), parameters_(std::move(parameters)) {}

  // Fills logits (classes entries) and, for the MLP, hidden activations.
  void Forward(std::span<const double> x, std::span<double> hidden,
               std::span<double> logits) const;

  ModelSpec spec_;
  std::vector<double> parameters_;
};

}  // namespace flip::dpsgd

#endif  // FLIP_DPSGD_MODEL_H_
