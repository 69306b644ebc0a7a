// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ris {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;     ///< worst observed error
    double tolerance = 0.0;
};

/// Numerical self-checks of the core routines (finite differences,
/// stationarity, normalisation, truncation optimality).
std::vector<CheckResult> run_numerical_checks(std::uint64_t seed = 7);

} // namespace ris
