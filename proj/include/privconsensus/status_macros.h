// Copyright 2026 The privconsensus Authors
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

#ifndef PRIVCONSENSUS_STATUS_MACROS_H_
#define PRIVCONSENSUS_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define PRIVCONSENSUS_CONCAT_IMPL(x, y) x##y
#define PRIVCONSENSUS_CONCAT(x, y) PRIVCONSENSUS_CONCAT_IMPL(x, y)

#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const absl::Status _status_ = (expr);      \
    if (!_status_.ok()) return _status_;       \
  } while (0)

#define ASSIGN_OR_RETURN_IMPL(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                          \
  if (!tmp.ok()) return tmp.status();          \
  lhs = std::move(tmp).value()

#define ASSIGN_OR_RETURN(lhs, rexpr) \
  ASSIGN_OR_RETURN_IMPL(             \
      PRIVCONSENSUS_CONCAT(_status_or_, __LINE__), lhs, rexpr)

#endif  // PRIVCONSENSUS_STATUS_MACROS_H_
