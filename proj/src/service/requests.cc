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

#include "flip/service/requests.h"

#include "absl/strings/str_format.h"
#include "flip/common/json_reader.h"
#include "flip/common/status.h"
#include "flip/fl/serialization.h"

namespace flip::service {

using nlohmann::json;

absl::StatusOr<CalibrateRequest> CalibrateRequest::FromJson(const json& j) {
  CalibrateRequest r;
  ObjectReader in(j, "calibrate");
  if (in.Has("epsilon") && in.Has("epsilons")) {
    return absl::InvalidArgumentError(
        "calibrate: give either epsilon or epsilons, not both");
  }
  if (in.Has("epsilon")) {
    double eps = 0;
    in.Get("epsilon", eps);
    r.epsilons = {eps};
  }
  in.Get("epsilons", r.epsilons);
  r.list_form = in.Has("epsilons");
  in.Get("delta", r.delta);
  std::string scheme = "poisson";
  in.Get("scheme", scheme);
  in.Get("batch", r.batch_size);
  in.Get("dataset_size", r.dataset_size);
  in.Get("rounds", r.rounds);
  in.Get("local_epochs", r.local_epochs);
  if (in.Has("adjacency")) {
    accountant::Adjacency adj{};
    in.GetEnum("adjacency", adj, [](const std::string& s) {
      return accountant::ParseAdjacency(s);
    });
    r.adjacency = adj;
  }
  in.GetEnum("accounting", r.accounting, fl::ParseAccounting);
  std::vector<int> orders;
  in.Get("orders", orders);
  RETURN_IF_ERROR(in.Finish());
  if (scheme == "poisson") {
    r.poisson = true;
  } else if (scheme == "fixed") {
    r.poisson = false;
  } else {
    return absl::InvalidArgumentError(absl::StrFormat(
        "calibrate.scheme: unknown scheme '%s', expected poisson|fixed",
        scheme));
  }
  if (!orders.empty()) {
    if (orders.size() != 2) {
      return absl::InvalidArgumentError("calibrate.orders: expected [lo, hi]");
    }
    r.order_lo = orders[0];
    r.order_hi = orders[1];
  }
  RETURN_IF_ERROR(r.Validate());
  return r;
}

absl::Status CalibrateRequest::Validate() const {
  if (epsilons.empty()) {
    return absl::InvalidArgumentError("calibrate: epsilon is required");
  }
  for (double e : epsilons) {
    RETURN_IF_ERROR((accountant::PrivacyTarget{e, delta}).Validate());
  }
  if (batch_size < 1 || dataset_size < batch_size) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "calibrate: need 1 <= batch <= dataset_size (got %d, %d)", batch_size,
        dataset_size));
  }
  if (rounds < 1 || local_epochs < 1) {
    return absl::InvalidArgumentError(
        "calibrate: rounds and local_epochs must be >= 1");
  }
  if (order_lo < 2 || order_hi < order_lo) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "calibrate: order range must satisfy 2 <= lo <= hi (got %d..%d)",
        order_lo, order_hi));
  }
  return absl::OkStatus();
}

accountant::Adjacency CalibrateRequest::EffectiveAdjacency() const {
  return adjacency.value_or(poisson ? accountant::Adjacency::kAddRemove
                                    : accountant::Adjacency::kReplaceOne);
}

absl::StatusOr<accountant::SubsamplingScheme> CalibrateRequest::Scheme()
    const {
  if (poisson) {
    return accountant::SubsamplingScheme::Poisson(
        static_cast<double>(batch_size) / static_cast<double>(dataset_size),
        EffectiveAdjacency());
  }
  return accountant::SubsamplingScheme::FixedSize(batch_size, dataset_size,
                                                  EffectiveAdjacency());
}

int64_t CalibrateRequest::Steps() const {
  return accountant::AccountedSteps(accounting, rounds, dataset_size,
                                    batch_size, local_epochs);
}

absl::StatusOr<std::vector<CalibrateResult>> RunCalibrate(
    const CalibrateRequest& request) {
  RETURN_IF_ERROR(request.Validate());
  ASSIGN_OR_RETURN(accountant::SubsamplingScheme scheme, request.Scheme());
  const std::vector<double> orders =
      accountant::IntegerOrders(request.order_lo, request.order_hi);
  std::vector<CalibrateResult> out;
  for (double eps : request.epsilons) {
    ASSIGN_OR_RETURN(accountant::CalibrationResult cal,
                     accountant::CalibrateSigma({eps, request.delta}, scheme,
                                                request.Steps(), orders));
    out.push_back({eps, cal});
  }
  return out;
}

json CalibrateResponse(const CalibrateRequest& request,
                       const std::vector<CalibrateResult>& results) {
  json items = json::array();
  for (const auto& r : results) {
    items.push_back({{"target_epsilon", r.target_epsilon},
                     {"sigma", r.calibration.sigma},
                     {"epsilon", r.calibration.epsilon},
                     {"order", r.calibration.order}});
  }
  json common = {
      {"scheme", request.poisson ? "poisson" : "fixed"},
      {"adjacency", accountant::AdjacencyName(request.EffectiveAdjacency())},
      {"accounting", fl::AccountingName(request.accounting)},
      {"batch", request.batch_size},
      {"dataset_size", request.dataset_size},
      {"delta", request.delta},
      {"steps", request.Steps()}};
  if (!request.list_form && results.size() == 1) {
    json single = items[0];
    single.update(common);
    return single;
  }
  common["results"] = items;
  return common;
}

}  // namespace flip::service
