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

struct CompletionProblem {
    CMat D_check; ///< L x T_r, permutation-corrected masked estimate
    RMat mask;    ///< L x T_r, 0/1 schedule
    CMat X_b;     ///< N x T_r pilots
    int rank = 1;
    int max_iter = 500;
    double residual_tol = 1e-10;   ///< absolute masked-residual stop
    double stagnation_tol = 1e-8;  ///< relative change over stagnation_window iterations
    int stagnation_window = 10;

    void validate() const;
};

struct CompletionResult {
    CMat G;  ///< L x N
    CMat F;  ///< L x T_r completed low-rank matrix
    int iterations = 0;
    std::vector<double> residual_history; ///< masked residual ||S o (D - F)||_F after each iterate
    bool undersampled = false;           ///< fewer observations than r (L + N - r)
};

/// Best rank-r approximation (truncated SVD).
CMat hard_threshold_rank(const CMat& Q, int r);

/// Normalised iterative hard thresholding for F = G X_b with rank(G) = r.
/// Iterates are kept in the row space of X_b, so the unknown is effectively
/// the L x N matrix G; returns G = F X_b^H (X_b X_b^H)^{-1}.
CompletionResult niht(const CompletionProblem& problem);

} // namespace ris
