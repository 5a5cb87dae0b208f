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

#ifndef FLIP_ACCOUNTANT_CALIBRATION_H_
#define FLIP_ACCOUNTANT_CALIBRATION_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "flip/accountant/privacy_params.h"
#include "flip/accountant/rdp.h"

namespace flip::accountant {

// Which releases the accountant counts.
//   kPerStep:  every DP-SGD step, T = rounds * epochs * ceil(n / L).
//   kPerRound: one release per federated round, T = rounds.
enum class AccountingConvention { kPerStep, kPerRound };

int64_t StepsPerEpoch(int64_t dataset_size, int64_t batch_size);
int64_t AccountedSteps(AccountingConvention convention, int64_t rounds,
                       int64_t dataset_size, int64_t batch_size,
                       int64_t local_epochs = 1);

struct CalibrationOptions {
  double sigma_lower = 1e-2;
  double sigma_upper = 1e3;
  int max_iterations = 60;
  // Accept sigma once eps(sigma) lies in [target - tol * target, target].
  double relative_tolerance = 1e-3;
};

struct CalibrationResult {
  double sigma = 0;
  double epsilon = 0;  // achieved, never above the target
  double order = 0;    // order attaining the minimum in the conversion
  int iterations = 0;
};

// Achieved epsilon after `steps` identical releases with noise multiplier
// `sigma` under `scheme`.
absl::StatusOr<DpConversion> EpsilonForSigma(
    double sigma, const SubsamplingScheme& scheme, int64_t steps, double delta,
    std::span<const double> orders = DefaultOrders());

// Smallest noise multiplier (up to tolerance, rounded to the conservative
// side) whose composed guarantee meets `target`. Bisects log(sigma) over
// [sigma_lower, sigma_upper]. A calibration-failure status names the bracket
// endpoint when the target cannot be met inside the bracket.
absl::StatusOr<CalibrationResult> CalibrateSigma(
    const PrivacyTarget& target, const SubsamplingScheme& scheme,
    int64_t steps, std::span<const double> orders = DefaultOrders(),
    const CalibrationOptions& options = {});

}  // namespace flip::accountant

#endif  // FLIP_ACCOUNTANT_CALIBRATION_H_
