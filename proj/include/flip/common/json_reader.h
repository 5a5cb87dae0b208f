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

#ifndef FLIP_COMMON_JSON_READER_H_
#define FLIP_COMMON_JSON_READER_H_

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace flip {

// Reads known keys from a JSON object and reports the first type error or
// unknown key.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string where)
      : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) {
      status_ = absl::InvalidArgumentError(
          absl::StrCat(where_, ": expected a JSON object"));
    }
  }

  template <typename T>
  void Get(const char* key, T& out) {
    if (!status_.ok() || !j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      status_ = absl::InvalidArgumentError(
          absl::StrCat(where_, ".", key, ": ", e.what()));
    }
  }

  // Null or absent leaves `out` empty.
  template <typename T>
  void GetOptional(const char* key, std::optional<T>& out) {
    if (!status_.ok() || !j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      seen_.insert(key);
      out.reset();
      return;
    }
    T value{};
    Get(key, value);
    if (status_.ok()) out = value;
  }

  template <typename T, typename Parse>
  void GetEnum(const char* key, T& out, Parse parse) {
    std::string name;
    if (!status_.ok() || !j_.contains(key)) return;
    Get(key, name);
    if (!status_.ok()) return;
    auto parsed = parse(name);
    if (!parsed.ok()) {
      status_ = absl::InvalidArgumentError(absl::StrCat(
          where_, ".", key, ": ", std::string(parsed.status().message())));
      return;
    }
    out = *parsed;
  }

  bool Has(const char* key) const { return j_.contains(key); }
  const nlohmann::json& Sub(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  void Fail(absl::Status s) {
    if (status_.ok()) status_ = std::move(s);
  }

  absl::Status Finish() const {
    if (!status_.ok()) return status_;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        return absl::InvalidArgumentError(
            absl::StrCat(where_, ": unknown key '", item.key(), "'"));
      }
    }
    return absl::OkStatus();
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> seen_;
  absl::Status status_;
};

}  // namespace flip

#endif  // FLIP_COMMON_JSON_READER_H_
