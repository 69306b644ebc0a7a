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

#include <vector>

namespace ris {

enum class TrainingStage { direct, lis };

/// Pilot matrix (N x T) with total energy ||X||_F^2 = power.
struct TrainingMatrix {
    CMat X;
    double power = 1.0;
    TrainingStage stage = TrainingStage::direct;
};

/// LIS ON/OFF schedule during the second training stage.
struct PhaseSchedule {
    RMat S; ///< L x T_r, entries in {0, 1}
    std::vector<std::vector<int>> per_column_support;
    double sparsity_rate = 1.0;
    int active_per_column = 0; ///< K

    CMat as_complex() const { return S.cast<cdouble>(); }
};

/// K = ceil(rho * L), guarding against round-off pushing an exact product up.
int active_elements(int L, double rho);

TrainingMatrix dft_training(int N, int T_d, double power);
TrainingMatrix random_training(Rng& rng, int N, int T_r, double power);
PhaseSchedule sparse_schedule(Rng& rng, int L, int T_r, double rho);

bool rows_distinct(const RMat& S);

} // namespace ris
