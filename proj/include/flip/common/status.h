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

#ifndef FLIP_COMMON_STATUS_H_
#define FLIP_COMMON_STATUS_H_

#include <string>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

#define FLIP_STATUS_CONCAT_INNER_(x, y) x##y
#define FLIP_STATUS_CONCAT_(x, y) FLIP_STATUS_CONCAT_INNER_(x, y)

#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const ::absl::Status _flip_status = (expr); \
    if (!_flip_status.ok()) return _flip_status; \
  } while (0)

#define FLIP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  if (!statusor.ok()) return statusor.status();          \
  lhs = std::move(*statusor)

#define ASSIGN_OR_RETURN(lhs, rexpr) \
  FLIP_ASSIGN_OR_RETURN_IMPL_(       \
      FLIP_STATUS_CONCAT_(_flip_statusor_, __LINE__), lhs, rexpr)

namespace flip {

// Domain error kinds. Each maps onto a canonical absl code and carries a
// stable message prefix so callers (CLI, HTTP layer) can classify them.
inline constexpr char kCalibrationFailurePrefix[] = "calibration failure: ";
inline constexpr char kNumericalFailurePrefix[] = "numerical failure: ";
inline constexpr char kPolicyDegeneratePrefix[] = "policy degenerate: ";

inline absl::Status CalibrationFailureError(const std::string& message) {
  return absl::OutOfRangeError(absl::StrCat(kCalibrationFailurePrefix, message));
}
inline absl::Status NumericalFailureError(const std::string& message) {
  return absl::InternalError(absl::StrCat(kNumericalFailurePrefix, message));
}
inline absl::Status PolicyDegenerateError(const std::string& message) {
  return absl::FailedPreconditionError(
      absl::StrCat(kPolicyDegeneratePrefix, message));
}

inline bool IsCalibrationFailure(const absl::Status& status) {
  return absl::IsOutOfRange(status) &&
         absl::StartsWith(status.message(), kCalibrationFailurePrefix);
}
inline bool IsNumericalFailure(const absl::Status& status) {
  return absl::IsInternal(status) &&
         absl::StartsWith(status.message(), kNumericalFailurePrefix);
}
inline bool IsPolicyDegenerate(const absl::Status& status) {
  return absl::IsFailedPrecondition(status) &&
         absl::StartsWith(status.message(), kPolicyDegeneratePrefix);
}

}  // namespace flip

#endif  // FLIP_COMMON_STATUS_H_
