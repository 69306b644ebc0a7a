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

enum class PermutationSource { recovered, ground_truth };

/// perm[n] = n' means row n of the estimate corresponds to row n' of the reference.
struct PermutationMap {
    std::vector<int> perm;
    PermutationSource source = PermutationSource::recovered;
    std::vector<int> degenerate_rows; ///< estimate rows whose scores were all zero

    static PermutationMap identity(int L);
    bool is_bijection() const;
};

struct PermutedChannels {
    CMat H; ///< M x L, columns reordered
    CMat D; ///< L x T, rows reordered
};

/// 1 where |D(l,t)| > tau_rel * max_l |D(l,t)|.
RMat state_matrix(const CMat& D_hat, double tau_rel = 0.1);

/// Greedy bijection maximising row inner products between S_bar and S.
PermutationMap recover_permutation(const RMat& S, const RMat& S_bar);

/// Greedy bijection on normalised |correlation| between rows of D_hat and D_true.
PermutationMap oracle_permutation(const CMat& D_hat, const CMat& D_true);

PermutedChannels apply_permutation(const CMat& H_hat, const CMat& D_hat, const PermutationMap& p);

/// Column-permute the estimate, fit one complex scalar per column and return the NMSE in dB
/// (floored at -300).
double nmse_ambiguity_aware(const CMat& H_true, const CMat& H_hat, const PermutationMap& p);

} // namespace ris
