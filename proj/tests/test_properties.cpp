// Copyright 2026 The TSQ Authors.
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

#include <doctest.h>

#include "suites/invariant_suite.hpp"
#include "suites/oracle_suite.hpp"

TEST_CASE("invariants hold on randomized instances") {
  for (const auto& [name, result] : suites::run_invariant_suite(200, 50'000)) {
    INFO(name << ": " << result.first_failure);
    CHECK(result.passed());
  }
}

TEST_CASE("library agrees with the scalar oracles on randomized instances") {
  for (const auto& [name, result] : suites::run_oracle_suite(100, 90'000)) {
    INFO(name << ": " << result.first_failure);
    CHECK(result.passed());
  }
}
