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

#ifndef FLIP_ACCOUNTANT_MIXTURE_DIVERGENCE_H_
#define FLIP_ACCOUNTANT_MIXTURE_DIVERGENCE_H_

#include "absl/status/statusor.h"

namespace flip::accountant {

// Normalized units: P0 = N(0, 1), P1 = (1 - q) N(0, 1) + q N(shift, 1).
enum class DivergenceDirection {
  kMixtureToBase,  // D_a(P1 || P0)
  kBaseToMixture,  // D_a(P0 || P1)
};

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  // Mass below exp(-truncation_nats) relative to the integrand peak is
  // dropped.
  double truncation_nats = 60.0;
  // Bisection depth per two-unit panel.
  unsigned max_depth = 20;
};

// log of the integral  int P_a(x)^a P_b(x)^(1-a) dx  for the ordered pair
// selected by `direction`, computed by adaptive Gauss-Kronrod quadrature over
// the region where the integrand is non-negligible. `order` may be any real
// greater than one.
absl::StatusOr<double> LogMixtureMoment(double order, double rate, double shift,
                                        DivergenceDirection direction,
                                        const QuadratureOptions& options = {});

// Renyi divergence of order `order` for the given direction.
absl::StatusOr<double> MixtureRenyiDivergence(
    double order, double rate, double shift, DivergenceDirection direction,
    const QuadratureOptions& options = {});

}  // namespace flip::accountant

#endif  // FLIP_ACCOUNTANT_MIXTURE_DIVERGENCE_H_
