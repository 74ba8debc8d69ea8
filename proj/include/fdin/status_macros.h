/* Copyright 2026 The FDIN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FDIN_STATUS_MACROS_H_
#define FDIN_STATUS_MACROS_H_

#include <cstdio>
#include <cstdlib>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define FDIN_STATUS_CONCAT_INNER_(x, y) x##y
#define FDIN_STATUS_CONCAT_(x, y) FDIN_STATUS_CONCAT_INNER_(x, y)

#define FDIN_RETURN_IF_ERROR(expr)               \
  do {                                           \
    const absl::Status _fdin_status = (expr);    \
    if (!_fdin_status.ok()) return _fdin_status; \
  } while (0)

#define FDIN_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                \
  if (!tmp.ok()) return tmp.status();               \
  lhs = std::move(tmp).value()

#define FDIN_ASSIGN_OR_RETURN(lhs, expr)                                      \
  FDIN_ASSIGN_OR_RETURN_IMPL_(FDIN_STATUS_CONCAT_(_fdin_statusor_, __LINE__), \
                              lhs, expr)

// Internal invariant; a violation is a programming error, not bad input.
#define FDIN_CHECK(cond)                                                    \
  do {                                                                      \
    if (!(cond)) {                                                          \
      std::fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
                   #cond);                                                  \
      std::abort();                                                         \
    }                                                                       \
  } while (0)

#endif  // FDIN_STATUS_MACROS_H_
