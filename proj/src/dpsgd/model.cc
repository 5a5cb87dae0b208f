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

#include "flip/dpsgd/model.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace flip::dpsgd {
namespace {

// Softmax in place; returns log-sum-exp of the input.
double Softmax(std::span<double> z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double& v : z) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return peak + std::log(sum);
}

}  // namespace

Dataset Dataset::Subset(std::span<const int64_t> indices) const {
  Dataset out;
  out.dim = dim;
  out.classes = classes;
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (int64_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset MakeBlobs(const BlobSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> centres(static_cast<size_t>(spec.classes) * spec.dim);
  for (int c = 0; c < spec.classes; ++c) {
    double norm = 0;
    for (int j = 0; j < spec.dim; ++j) {
      const double v = normal(rng);
      centres[c * spec.dim + j] = v;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (int j = 0; j < spec.dim; ++j) {
      centres[c * spec.dim + j] *= spec.separation / norm;
    }
  }

  Dataset data;
  data.dim = spec.dim;
  data.classes = spec.classes;
  data.features.resize(static_cast<size_t>(spec.n) * spec.dim);
  data.labels.resize(spec.n);
  for (int64_t i = 0; i < spec.n; ++i) {
    const int c = static_cast<int>(i % spec.classes);
    data.labels[i] = c;
    for (int j = 0; j < spec.dim; ++j) {
      data.features[i * spec.dim + j] = centres[c * spec.dim + j] + normal(rng);
    }
  }
  return data;
}

std::string ArchitectureName(Architecture arch) {
  return arch == Architecture::kLogistic ? "logistic" : "mlp";
}

absl::StatusOr<Architecture> ParseArchitecture(const std::string& name) {
  if (name == "logistic") return Architecture::kLogistic;
  if (name == "mlp") return Architecture::kMlp;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown architecture '", name, "', expected logistic|mlp"));
}

int64_t ModelSpec::ParameterCount() const {
  if (architecture == Architecture::kLogistic) {
    return static_cast<int64_t>(classes) * (dim + 1);
  }
  return static_cast<int64_t>(hidden) * (dim + 1) +
         static_cast<int64_t>(classes) * (hidden + 1);
}

absl::StatusOr<Model> Model::Create(const ModelSpec& spec,
                                    std::vector<double> parameters) {
  if (spec.dim < 1 || spec.classes < 2 ||
      (spec.architecture == Architecture::kMlp && spec.hidden < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "invalid model shape: dim=%d classes=%d hidden=%d", spec.dim,
        spec.classes, spec.hidden));
  }
  if (static_cast<int64_t>(parameters.size()) != spec.ParameterCount()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s model expects %d parameters, got %d",
        ArchitectureName(spec.architecture), spec.ParameterCount(),
        parameters.size()));
  }
  for (double v : parameters) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("model parameters must be finite");
    }
  }
  return Model(spec, std::move(parameters));
}

absl::StatusOr<Model> Model::Initialize(const ModelSpec& spec, uint64_t seed) {
  std::vector<double> params(std::max<int64_t>(spec.ParameterCount(), 0), 0.0);
  if (spec.architecture == Architecture::kMlp && spec.dim > 0 &&
      spec.hidden > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> w1(0.0, 1.0 / std::sqrt(spec.dim));
    std::normal_distribution<double> w2(0.0, 1.0 / std::sqrt(spec.hidden));
    const int64_t w1_size = static_cast<int64_t>(spec.hidden) * spec.dim;
    const int64_t w2_offset = w1_size + spec.hidden;
    for (int64_t i = 0; i < w1_size; ++i) params[i] = w1(rng);
    for (int64_t i = 0; i < static_cast<int64_t>(spec.classes) * spec.hidden;
         ++i) {
      params[w2_offset + i] = w2(rng);
    }
  }
  return Create(spec, std::move(params));
}

bool Model::AllFinite() const {
  return std::all_of(parameters_.begin(), parameters_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Model::Forward(std::span<const double> x, std::span<double> hidden,
                    std::span<double> logits) const {
  const int d = spec_.dim;
  const int c = spec_.classes;
  const double* p = parameters_.data();
  if (spec_.architecture == Architecture::kLogistic) {
    const double* bias = p + c * d;
    for (int k = 0; k < c; ++k) {
      double z = bias[k];
      for (int j = 0; j < d; ++j) z += p[k * d + j] * x[j];
      logits[k] = z;
    }
    return;
  }
  const int h = spec_.hidden;
  const double* w1 = p;
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  const double* b2 = w2 + c * h;
  for (int u = 0; u < h; ++u) {
    double a = b1[u];
    for (int j = 0; j < d; ++j) a += w1[u * d + j] * x[j];
    hidden[u] = std::tanh(a);
  }
  for (int k = 0; k < c; ++k) {
    double z = b2[k];
    for (int u = 0; u < h; ++u) z += w2[k * h + u] * hidden[u];
    logits[k] = z;
  }
}

double Model::LossAndGradient(std::span<const double> x, int label,
                              std::span<double> grad) const {
  const int d = spec_.dim;
  const int c = spec_.classes;
  const int h = spec_.architecture == Architecture::kMlp ? spec_.hidden : 0;
  std::vector<double> hidden(h);
  std::vector<double> probs(c);
  Forward(x, hidden, probs);
  const double z_label = probs[label];
  const double loss = Softmax(probs) - z_label;
  probs[label] -= 1.0;  // now d loss / d logits

  if (spec_.architecture == Architecture::kLogistic) {
    for (int k = 0; k < c; ++k) {
      for (int j = 0; j < d; ++j) grad[k * d + j] = probs[k] * x[j];
      grad[c * d + k] = probs[k];
    }
    return loss;
  }

  const double* w2 = parameters_.data() + h * d + h;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + h * d;
  double* g_w2 = g_b1 + h;
  double* g_b2 = g_w2 + c * h;
  for (int k = 0; k < c; ++k) {
    for (int u = 0; u < h; ++u) g_w2[k * h + u] = probs[k] * hidden[u];
    g_b2[k] = probs[k];
  }
  for (int u = 0; u < h; ++u) {
    double back = 0;
    for (int k = 0; k < c; ++k) back += w2[k * h + u] * probs[k];
    back *= 1.0 - hidden[u] * hidden[u];
    for (int j = 0; j < d; ++j) g_w1[u * d + j] = back * x[j];
    g_b1[u] = back;
  }
  return loss;
}

double Model::Loss(std::span<const double> x, int label) const {
  std::vector<double> hidden(
      spec_.architecture == Architecture::kMlp ? spec_.hidden : 0);
  std::vector<double> logits(spec_.classes);
  Forward(x, hidden, logits);
  const double z_label = logits[label];
  return Softmax(logits) - z_label;
}

int Model::Predict(std::span<const double> x) const {
  std::vector<double> hidden(
      spec_.architecture == Architecture::kMlp ? spec_.hidden : 0);
  std::vector<double> logits(spec_.classes);
  Forward(x, hidden, logits);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

}  // namespace flip::dpsgd
