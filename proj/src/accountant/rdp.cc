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

#include "flip/accountant/rdp.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "flip/accountant/mixture_divergence.h"
#include "flip/common/status.h"

namespace flip::accountant {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

absl::Status ValidateSigma(double sigma) {
  return NoiseMultiplier::Create(sigma).status();
}

absl::Status ValidateOrders(std::span<const double> orders, bool integral) {
  if (orders.empty()) {
    return absl::InvalidArgumentError("order grid is empty");
  }
  for (size_t i = 0; i < orders.size(); ++i) {
    const double a = orders[i];
    if (!std::isfinite(a) || a <= 1) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Renyi orders must be finite and > 1, got %g", a));
    }
    if (integral && a != std::floor(a)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "the binomial expansion needs integer orders, got %g", a));
    }
    if (i > 0 && a <= orders[i - 1]) {
      return absl::InvalidArgumentError("orders must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

// Rounding in the kernels can leave a curve a few ulps from monotone; the
// divergence itself is nondecreasing in the order, so enforce it.
void EnforceMonotone(std::vector<double>& values) {
  for (size_t i = 1; i < values.size(); ++i) {
    values[i] = std::max(values[i], values[i - 1]);
  }
}

}  // namespace

namespace internal {

double PoissonRdpAtOrder(int order, double rate, double shift) {
  const double a = order;
  if (rate >= 1.0) return 0.5 * a * shift * shift;
  const double log_keep = std::log1p(-rate);
  const double log_rate = std::log(rate);
  const double half_s2 = 0.5 * shift * shift;

  // log C(a, j) carried incrementally.
  double log_binom = 0;
  double peak = kNegInf;
  std::vector<double> terms(order + 1);
  for (int j = 0; j <= order; ++j) {
    if (j > 0) log_binom += std::log(a - j + 1) - std::log(static_cast<double>(j));
    terms[j] = log_binom + (a - j) * log_keep + j * log_rate +
               static_cast<double>(j) * (j - 1) * half_s2;
    peak = std::max(peak, terms[j]);
  }
  double sum = 0;
  for (double t : terms) sum += std::exp(t - peak);
  return std::max(0.0, (peak + std::log(sum)) / (a - 1.0));
}

absl::StatusOr<double> FixedSizeRdpAtOrder(double order, double rate,
                                           double shift) {
  if (rate >= 1.0) return 0.5 * order * shift * shift;
  ASSIGN_OR_RETURN(const double forward,
                   MixtureRenyiDivergence(order, rate, shift,
                                          DivergenceDirection::kMixtureToBase));
  ASSIGN_OR_RETURN(const double backward,
                   MixtureRenyiDivergence(order, rate, shift,
                                          DivergenceDirection::kBaseToMixture));
  return std::max(forward, backward);
}

}  // namespace internal

std::vector<double> IntegerOrders(int lo, int hi) {
  std::vector<double> orders;
  for (int a = lo; a <= hi; ++a) orders.push_back(a);
  return orders;
}

const std::vector<double>& DefaultOrders() {
  static const std::vector<double>* const kOrders =
      new std::vector<double>(IntegerOrders(2, 256));
  return *kOrders;
}

absl::StatusOr<RdpCurve> GaussianRdp(double sigma,
                                     std::span<const double> orders) {
  RETURN_IF_ERROR(ValidateSigma(sigma));
  RETURN_IF_ERROR(ValidateOrders(orders, /*integral=*/false));
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double a : orders) curve.values.push_back(a / (2.0 * sigma * sigma));
  return curve;
}

absl::StatusOr<RdpCurve> PoissonSubsampledRdp(double sigma, double rate,
                                              std::span<const double> orders) {
  RETURN_IF_ERROR(ValidateSigma(sigma));
  if (!(rate > 0 && rate <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Poisson rate must lie in (0, 1], got %g", rate));
  }
  RETURN_IF_ERROR(ValidateOrders(orders, /*integral=*/true));
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double a : orders) {
    if (rate >= 1.0) {
      curve.values.push_back(a / (2.0 * sigma * sigma));
    } else {
      curve.values.push_back(
          internal::PoissonRdpAtOrder(static_cast<int>(a), rate, 1.0 / sigma));
    }
  }
  EnforceMonotone(curve.values);
  return curve;
}

absl::StatusOr<RdpCurve> FixedSizeRdp(double sigma, int64_t batch_size,
                                      int64_t population, Adjacency adjacency,
                                      std::span<const double> orders) {
  RETURN_IF_ERROR(ValidateSigma(sigma));
  ASSIGN_OR_RETURN(const SubsamplingScheme scheme,
                   SubsamplingScheme::FixedSize(batch_size, population,
                                                adjacency));
  RETURN_IF_ERROR(ValidateOrders(orders, /*integral=*/false));
  const double shift = NormalizedSensitivity(adjacency) / sigma;
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double a : orders) {
    ASSIGN_OR_RETURN(const double value,
                     internal::FixedSizeRdpAtOrder(a, scheme.rate(), shift));
    curve.values.push_back(value);
  }
  EnforceMonotone(curve.values);
  return curve;
}

absl::StatusOr<RdpCurve> SchemeRdp(double sigma,
                                   const SubsamplingScheme& scheme,
                                   std::span<const double> orders) {
  if (scheme.is_poisson()) {
    // Doubling the sensitivity is the same as halving sigma.
    return PoissonSubsampledRdp(
        sigma / NormalizedSensitivity(scheme.adjacency()), scheme.rate(),
        orders);
  }
  return FixedSizeRdp(sigma, scheme.batch_size(), scheme.population(),
                      scheme.adjacency(), orders);
}

RdpCurve Compose(const RdpCurve& curve, int64_t steps) {
  RdpCurve composed = curve;
  const double factor = static_cast<double>(steps);
  for (double& v : composed.values) v *= factor;
  return composed;
}

absl::StatusOr<DpConversion> RdpToDp(const RdpCurve& curve, double delta) {
  if (curve.empty() || curve.orders.size() != curve.values.size()) {
    return absl::InvalidArgumentError("RDP curve is empty or malformed");
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  const double log_inv_delta = -std::log(delta);
  DpConversion best{std::numeric_limits<double>::infinity(), 0};
  for (size_t i = 0; i < curve.size(); ++i) {
    const double eps =
        curve.values[i] + log_inv_delta / (curve.orders[i] - 1.0);
    if (eps < best.epsilon) best = {eps, curve.orders[i]};
  }
  if (!std::isfinite(best.epsilon)) {
    return NumericalFailureError("no finite epsilon on the order grid");
  }
  return best;
}

}  // namespace flip::accountant
