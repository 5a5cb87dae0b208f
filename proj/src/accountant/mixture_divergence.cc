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

#include "flip/accountant/mixture_divergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "absl/strings/str_format.h"
#include "boost/math/quadrature/gauss_kronrod.hpp"
#include "flip/common/status.h"

namespace flip::accountant {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kScanStep = 0.5;

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(P1(x) / P0(x)) = log(1 - q + q exp(s x - s^2 / 2)).
struct LogLikelihoodRatio {
  double log_keep;  // log(1 - q), -inf when q == 1
  double log_rate;
  double shift;

  double operator()(double x) const {
    return LogAddExp(log_keep, log_rate + shift * x - 0.5 * shift * shift);
  }
};

}  // namespace

absl::StatusOr<double> LogMixtureMoment(double order, double rate, double shift,
                                        DivergenceDirection direction,
                                        const QuadratureOptions& options) {
  if (!(order > 1) || !std::isfinite(order)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Renyi order must be finite and > 1, got %g", order));
  }
  if (!(rate > 0 && rate <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sampling rate must lie in (0, 1], got %g", rate));
  }
  if (!(shift > 0) || !std::isfinite(shift)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("shift must be positive and finite, got %g", shift));
  }

  const LogLikelihoodRatio ratio{rate < 1 ? std::log1p(-rate) : kNegInf,
                                 std::log(rate), shift};
  // Integrand = P0(x) * (P1/P0)^power.
  const double power =
      direction == DivergenceDirection::kMixtureToBase ? order : 1.0 - order;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi);
  auto log_integrand = [&](double x) {
    return log_norm - 0.5 * x * x + power * ratio(x);
  };

  // The integrand is a superposition of unit-width bumps centred in
  // [0, order * shift] (mixture-to-base) or [-(order - 1) * shift, 0]
  // (base-to-mixture); beyond `margin` from that span it is negligible.
  const double margin =
      std::sqrt(2.0 * (options.truncation_nats + std::log(order + 2.0))) + 1.0;
  double lo, hi;
  if (direction == DivergenceDirection::kMixtureToBase) {
    lo = -margin;
    hi = order * shift + margin;
  } else {
    lo = -(order - 1.0) * shift - margin;
    hi = margin;
  }

  const auto points = static_cast<size_t>(std::ceil((hi - lo) / kScanStep)) + 1;
  std::vector<double> scan(points);
  double peak = kNegInf;
  for (size_t i = 0; i < points; ++i) {
    scan[i] = log_integrand(lo + kScanStep * static_cast<double>(i));
    peak = std::max(peak, scan[i]);
  }
  if (!std::isfinite(peak)) {
    return NumericalFailureError(absl::StrFormat(
        "integrand peak not finite (order=%g rate=%g shift=%g)", order, rate,
        shift));
  }

  // Contiguous runs of scan points within the truncation window, padded by
  // one scan step on each side.
  std::vector<std::pair<double, double>> pieces;
  const double floor = peak - options.truncation_nats;
  for (size_t i = 0; i < points;) {
    if (scan[i] < floor) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < points && scan[j + 1] >= floor) ++j;
    const double a = lo + kScanStep * (static_cast<double>(i) - 1.0);
    const double b = lo + kScanStep * (static_cast<double>(j) + 1.0);
    if (!pieces.empty() && a <= pieces.back().second) {
      pieces.back().second = b;
    } else {
      pieces.emplace_back(a, b);
    }
    i = j + 1;
  }

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto scaled = [&](double x) { return std::exp(log_integrand(x) - peak); };
  double total = 0;
  double total_error = 0;
  for (const auto& [a, b] : pieces) {
    // Panels of at most two units so every bump is resolved from the start.
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 2.0)));
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      double error = 0;
      const double x0 = a + width * p;
      total += Quadrature::integrate(scaled, x0, x0 + width, options.max_depth,
                                     options.relative_tolerance * 1e-2, &error);
      total_error += error;
    }
  }
  if (!(total > 0) || !std::isfinite(total) ||
      total_error > options.relative_tolerance * total) {
    return NumericalFailureError(absl::StrFormat(
        "quadrature did not reach relative tolerance %g (order=%g rate=%g "
        "shift=%g estimate=%g error=%g)",
        options.relative_tolerance, order, rate, shift, total, total_error));
  }
  return peak + std::log(total);
}

absl::StatusOr<double> MixtureRenyiDivergence(double order, double rate,
                                              double shift,
                                              DivergenceDirection direction,
                                              const QuadratureOptions& options) {
  ASSIGN_OR_RETURN(const double log_moment,
                   LogMixtureMoment(order, rate, shift, direction, options));
  // Renyi divergence is nonnegative; clamp quadrature round-off at q -> 0.
  return std::max(0.0, log_moment / (order - 1.0));
}

}  // namespace flip::accountant
