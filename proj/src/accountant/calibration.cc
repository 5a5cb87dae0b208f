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

#include "flip/accountant/calibration.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "flip/common/status.h"

namespace flip::accountant {
namespace {

absl::StatusOr<double> RdpAtOrder(double sigma, const SubsamplingScheme& scheme,
                                  double order) {
  const double shift = NormalizedSensitivity(scheme.adjacency()) / sigma;
  if (scheme.is_poisson()) {
    return internal::PoissonRdpAtOrder(static_cast<int>(order), scheme.rate(),
                                       shift);
  }
  return internal::FixedSizeRdpAtOrder(order, scheme.rate(), shift);
}

}  // namespace

int64_t StepsPerEpoch(int64_t dataset_size, int64_t batch_size) {
  return (dataset_size + batch_size - 1) / batch_size;
}

int64_t AccountedSteps(AccountingConvention convention, int64_t rounds,
                       int64_t dataset_size, int64_t batch_size,
                       int64_t local_epochs) {
  if (convention == AccountingConvention::kPerRound) return rounds;
  return rounds * local_epochs * StepsPerEpoch(dataset_size, batch_size);
}

absl::StatusOr<DpConversion> EpsilonForSigma(double sigma,
                                             const SubsamplingScheme& scheme,
                                             int64_t steps, double delta,
                                             std::span<const double> orders) {
  RETURN_IF_ERROR(NoiseMultiplier::Create(sigma).status());
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step count must be >= 1, got %d", steps));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  if (orders.empty()) return absl::InvalidArgumentError("order grid is empty");
  for (size_t i = 0; i < orders.size(); ++i) {
    if (!(orders[i] > 1) || (i > 0 && orders[i] <= orders[i - 1]) ||
        (scheme.is_poisson() && orders[i] != std::floor(orders[i]))) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "invalid order grid at index %d (value %g)", i, orders[i]));
    }
  }

  // R is nondecreasing in the order, so once steps * R(a) alone exceeds the
  // best epsilon found, no larger order can improve on it.
  const double log_inv_delta = -std::log(delta);
  const double t = static_cast<double>(steps);
  DpConversion best{std::numeric_limits<double>::infinity(), 0};
  for (double a : orders) {
    ASSIGN_OR_RETURN(const double r, RdpAtOrder(sigma, scheme, a));
    const double composed = t * r;
    if (composed >= best.epsilon) break;
    const double eps = composed + log_inv_delta / (a - 1.0);
    if (eps < best.epsilon) best = {eps, a};
  }
  return best;
}

absl::StatusOr<CalibrationResult> CalibrateSigma(
    const PrivacyTarget& target, const SubsamplingScheme& scheme,
    int64_t steps, std::span<const double> orders,
    const CalibrationOptions& options) {
  RETURN_IF_ERROR(target.Validate());
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step count must be >= 1, got %d", steps));
  }
  if (!(options.sigma_lower > 0 && options.sigma_lower < options.sigma_upper)) {
    return absl::InvalidArgumentError("invalid calibration bracket");
  }

  auto eps_at = [&](double sigma) {
    return EpsilonForSigma(sigma, scheme, steps, target.delta, orders);
  };
  const double floor = target.epsilon * (1.0 - options.relative_tolerance);

  ASSIGN_OR_RETURN(DpConversion at_upper, eps_at(options.sigma_upper));
  if (at_upper.epsilon > target.epsilon) {
    return CalibrationFailureError(absl::StrFormat(
        "target epsilon %g unreachable: upper bracket endpoint sigma=%g "
        "still gives epsilon=%g (%s, %d steps, delta=%g)",
        target.epsilon, options.sigma_upper, at_upper.epsilon,
        scheme.DebugString(), steps, target.delta));
  }
  ASSIGN_OR_RETURN(const DpConversion at_lower, eps_at(options.sigma_lower));
  if (at_lower.epsilon <= target.epsilon) {
    return CalibrationFailureError(absl::StrFormat(
        "target epsilon %g is met already at the lower bracket endpoint "
        "sigma=%g (epsilon=%g); the required noise lies below the bracket",
        target.epsilon, options.sigma_lower, at_lower.epsilon));
  }

  // Invariant: eps(lo) > target >= eps(hi).
  double lo = options.sigma_lower;
  double hi = options.sigma_upper;
  CalibrationResult result{hi, at_upper.epsilon, at_upper.order, 0};
  for (int i = 0; i < options.max_iterations; ++i) {
    if (result.epsilon >= floor) break;
    const double mid = std::sqrt(lo * hi);
    ASSIGN_OR_RETURN(const DpConversion at_mid, eps_at(mid));
    ++result.iterations;
    if (at_mid.epsilon > target.epsilon) {
      lo = mid;
    } else {
      hi = mid;
      result.sigma = mid;
      result.epsilon = at_mid.epsilon;
      result.order = at_mid.order;
    }
  }
  return result;
}

}  // namespace flip::accountant
