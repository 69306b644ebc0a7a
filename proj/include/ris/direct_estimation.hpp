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

#include "ris/linalg.hpp"

namespace ris {

struct Stage1Observation {
    CMat Y_a;              ///< M x T_d
    double noise_var = 0.0;
};

/// Y_a = Z_up X_a + N_a, with Z_up the M x N uplink direct channel.
Stage1Observation simulate_stage1(Rng& rng, const CMat& Z_up, const CMat& X_a, double noise_var);

/// Relaxed-MMSE estimate Y_a (X_a^H X_a + s2 I)^{-1} X_a^H of the uplink direct channel.
CMat rmmse_estimate(const CMat& Y_a, const CMat& X_a, double noise_var);

/// Residual direct-channel error variance carried into the second stage.
double stage2_error_variance(double noise_var, int M, double power);

} // namespace ris
