// Copyright 2026 The isolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace isolab {

/// One named numerical check: passes when residual <= tolerance.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

/// Ordered list of checks; passes when every check passes.
struct CheckReport {
  std::vector<Check> checks;

  void add(std::string name, double residual, double tolerance) {
    checks.push_back(Check{std::move(name), residual, tolerance, residual <= tolerance});
  }

  /// Records a check that is pass/fail by nature (residual 0 or 1).
  void add_flag(std::string name, bool ok) { checks.push_back(Check{std::move(name), ok ? 0.0 : 1.0, 0.0, ok}); }

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  double max_residual() const {
    double r = 0.0;
    for (const auto& c : checks) r = std::max(r, c.residual);
    return r;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void append(const CheckReport& other, const std::string& prefix = "") {
    for (auto c : other.checks) {
      c.name = prefix + c.name;
      checks.push_back(std::move(c));
    }
  }
};

}  // namespace isolab
