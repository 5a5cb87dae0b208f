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

#ifndef FLIP_SERVICE_REQUESTS_H_
#define FLIP_SERVICE_REQUESTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "flip/accountant/calibration.h"
#include "flip/accountant/privacy_params.h"
#include "flip/partition/partitioner.h"
#include "json.hpp"

namespace flip::service {

// Shape shared by `flip calibrate` and POST /calibrate.
struct CalibrateRequest {
  std::vector<double> epsilons;
  bool list_form = false;  // request used "epsilons"
  double delta = 1e-6;
  bool poisson = true;
  int64_t batch_size = 550;
  int64_t dataset_size = 0;
  int64_t rounds = 5;
  int64_t local_epochs = 1;
  // Defaults to add-remove for Poisson and replace-one for fixed-size.
  std::optional<accountant::Adjacency> adjacency;
  accountant::AccountingConvention accounting =
      accountant::AccountingConvention::kPerStep;
  int order_lo = 2;
  int order_hi = 256;

  // Accepts "epsilon" (one value) or "epsilons" (a list).
  static absl::StatusOr<CalibrateRequest> FromJson(const nlohmann::json& j);
  absl::Status Validate() const;
  accountant::Adjacency EffectiveAdjacency() const;
  absl::StatusOr<accountant::SubsamplingScheme> Scheme() const;
  int64_t Steps() const;
};

struct CalibrateResult {
  double target_epsilon = 0;
  accountant::CalibrationResult calibration;
};

absl::StatusOr<std::vector<CalibrateResult>> RunCalibrate(
    const CalibrateRequest& request);

// One result object for a single epsilon, {"results": [...]} for a list.
nlohmann::json CalibrateResponse(const CalibrateRequest& request,
                                 const std::vector<CalibrateResult>& results);

}  // namespace flip::service

#endif  // FLIP_SERVICE_REQUESTS_H_
