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

#include "flip/dpsgd/dp_sgd.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "absl/strings/str_format.h"
#include "flip/common/status.h"

namespace flip::dpsgd {
namespace {

absl::Status CheckClipNorm(double clip_norm) {
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clipping norm must be positive, got %g", clip_norm));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> ClipInPlace(std::span<double> g, double clip_norm) {
  RETURN_IF_ERROR(CheckClipNorm(clip_norm));
  double sq = 0;
  for (double v : g) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("gradient has non-finite entries");
    }
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= clip_norm) return norm;
  double scale = clip_norm / norm;
  // Rounding can leave the rescaled norm an ulp above the bound.
  for (;;) {
    double clipped_sq = 0;
    for (double v : g) clipped_sq += (v * scale) * (v * scale);
    const double clipped = std::sqrt(clipped_sq);
    if (clipped <= clip_norm) {
      for (double& v : g) v *= scale;
      return clipped;
    }
    scale = std::nextafter(scale, 0.0);
  }
}

absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double clip_norm) {
  std::vector<double> out(g.begin(), g.end());
  auto norm = ClipInPlace(out, clip_norm);
  if (!norm.ok()) return norm.status();
  return out;
}

absl::StatusOr<std::vector<double>> NoisyGradient(
    const Model& model, const Dataset& data, std::span<const int64_t> batch,
    const StepOptions& options, std::mt19937_64& noise_rng,
    StepReport* report) {
  RETURN_IF_ERROR(CheckClipNorm(options.clip_norm));
  if (!(options.sigma >= 0.0) || !std::isfinite(options.sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be >= 0, got %g", options.sigma));
  }
  StepReport local;
  StepReport& rep = report != nullptr ? *report : local;
  rep = StepReport{};
  rep.batch_size = static_cast<int64_t>(batch.size());
  if (batch.empty()) {
    rep.skipped = true;
    return std::vector<double>{};
  }
  const double normalizer =
      options.normalizer.value_or(static_cast<double>(batch.size()));
  if (!(normalizer > 0.0)) {
    return absl::InvalidArgumentError("normalizer must be positive");
  }

  const int64_t p = model.size();
  const int64_t b = static_cast<int64_t>(batch.size());
  // Per-example clipped gradients, row e for batch[e].
  std::vector<double> per_example(static_cast<size_t>(b * p));
  std::vector<double> losses(b);
  std::vector<double> norms(b);
  std::vector<absl::Status> errors(b);

  auto work = [&](int64_t lo, int64_t hi) {
    for (int64_t e = lo; e < hi; ++e) {
      const int64_t idx = batch[e];
      std::span<double> g(per_example.data() + e * p, static_cast<size_t>(p));
      losses[e] = model.LossAndGradient(data.row(idx), data.labels[idx], g);
      auto norm = ClipInPlace(g, options.clip_norm);
      if (!norm.ok()) {
        errors[e] = norm.status();
      } else {
        norms[e] = *norm;
      }
    }
  };
  const int workers =
      static_cast<int>(std::clamp<int64_t>(options.workers, 1, b));
  if (workers == 1) {
    work(0, b);
  } else {
    std::vector<std::thread> threads;
    const int64_t chunk = (b + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int64_t lo = w * chunk;
      const int64_t hi = std::min(b, lo + chunk);
      if (lo < hi) threads.emplace_back(work, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<double> grad(p, 0.0);
  double loss_sum = 0;
  for (int64_t e = 0; e < b; ++e) {
    if (!errors[e].ok()) {
      return NumericalFailureError(absl::StrFormat(
          "per-example gradient for record %d: %s", batch[e],
          std::string(errors[e].message())));
    }
    if (norms[e] > options.clip_norm) {
      return absl::InternalError(absl::StrFormat(
          "clipped norm %.17g exceeds bound %g", norms[e], options.clip_norm));
    }
    rep.max_clipped_norm = std::max(rep.max_clipped_norm, norms[e]);
    loss_sum += losses[e];
    const double* row = per_example.data() + e * p;
    for (int64_t j = 0; j < p; ++j) grad[j] += row[j];
  }
  rep.mean_loss = loss_sum / static_cast<double>(b);

  if (options.sigma > 0.0) {
    std::normal_distribution<double> noise(0.0,
                                           options.sigma * options.clip_norm);
    for (double& v : grad) v += noise(noise_rng);
  }
  for (double& v : grad) v /= normalizer;
  return grad;
}

absl::StatusOr<StepReport> NoisyStep(Model& model, const Dataset& data,
                                     std::span<const int64_t> batch,
                                     const StepOptions& options,
                                     std::mt19937_64& noise_rng) {
  StepReport report;
  ASSIGN_OR_RETURN(std::vector<double> grad,
                   NoisyGradient(model, data, batch, options, noise_rng,
                                 &report));
  if (report.skipped) return report;
  auto w = model.mutable_parameters();
  for (size_t j = 0; j < w.size(); ++j) w[j] -= options.learning_rate * grad[j];
  if (!model.AllFinite()) {
    return NumericalFailureError(
        "model parameters became non-finite after a DP-SGD step");
  }
  return report;
}

absl::Status PerRoundInject(std::span<double> update, double sigma,
                            double clip_norm, int64_t batch_size,
                            std::mt19937_64& rng) {
  if (batch_size < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("batch size must be >= 1, got %d", batch_size));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be >= 0, got %g", sigma));
  }
  if (sigma == 0.0) return absl::OkStatus();
  RETURN_IF_ERROR(CheckClipNorm(clip_norm));
  std::normal_distribution<double> noise(
      0.0, sigma * clip_norm / static_cast<double>(batch_size));
  for (double& v : update) v += noise(rng);
  return absl::OkStatus();
}

}  // namespace flip::dpsgd
