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

#ifndef FLIP_ACCOUNTANT_RDP_H_
#define FLIP_ACCOUNTANT_RDP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "flip/accountant/privacy_params.h"

namespace flip::accountant {

// Renyi divergence R(alpha) of one mechanism invocation, tabulated over a grid
// of orders alpha > 1. Orders are strictly increasing.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;

  size_t size() const { return orders.size(); }
  bool empty() const { return orders.empty(); }
};

// Integer orders lo, lo + 1, ..., hi.
std::vector<double> IntegerOrders(int lo, int hi);
// The default accounting grid {2, ..., 256}.
const std::vector<double>& DefaultOrders();

// R(alpha) = alpha / (2 sigma^2) for the Gaussian mechanism with unit
// sensitivity.
absl::StatusOr<RdpCurve> GaussianRdp(double sigma, std::span<const double> orders);

// Poisson-subsampled Gaussian with unit sensitivity, via the integer-order
// binomial expansion
//   R(a) = 1/(a-1) log sum_j C(a,j) (1-q)^(a-j) q^j exp(j(j-1)/(2 sigma^2)),
// summed in log space. Orders must be integers >= 2.
absl::StatusOr<RdpCurve> PoissonSubsampledRdp(double sigma, double rate,
                                              std::span<const double> orders);

// Fixed-size (without replacement) subsampled Gaussian. With q = m / n and
// shift D (2 for replace-one, 1 for add-remove), R(a) is the larger of the
// two directed Renyi divergences between N(0, sigma^2) and
// (1-q) N(0, sigma^2) + q N(D, sigma^2), each evaluated by adaptive
// quadrature to relative tolerance 1e-8. Fails with a numerical-failure
// status if the quadrature does not converge.
absl::StatusOr<RdpCurve> FixedSizeRdp(double sigma, int64_t batch_size,
                                      int64_t population, Adjacency adjacency,
                                      std::span<const double> orders);

// Dispatches on the scheme. Poisson with replace-one adjacency is the
// binomial expansion at doubled sensitivity.
absl::StatusOr<RdpCurve> SchemeRdp(double sigma, const SubsamplingScheme& scheme,
                                   std::span<const double> orders);

// RDP composes additively across identical steps. Requires steps >= 1.
RdpCurve Compose(const RdpCurve& curve, int64_t steps);

struct DpConversion {
  double epsilon = 0;
  double order = 0;
};

// eps = min_a [R(a) + log(1/delta) / (a - 1)].
absl::StatusOr<DpConversion> RdpToDp(const RdpCurve& curve, double delta);

namespace internal {

// Single-order kernels behind the curve builders; arguments are assumed
// validated. `shift` is the sensitivity divided by sigma.
double PoissonRdpAtOrder(int order, double rate, double shift);
absl::StatusOr<double> FixedSizeRdpAtOrder(double order, double rate,
                                           double shift);

}  // namespace internal

}  // namespace flip::accountant

#endif  // FLIP_ACCOUNTANT_RDP_H_
