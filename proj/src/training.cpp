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

#include "ris/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ris {

int active_elements(int L, double rho)
{
    const double raw = rho * static_cast<double>(L);
    const double nearest = std::round(raw);
    const double k = std::abs(raw - nearest) < 1e-9 ? nearest : std::ceil(raw);
    return static_cast<int>(k);
}

TrainingMatrix dft_training(int N, int T_d, double power)
{
    if (N < 1 || T_d < N) {
        throw std::invalid_argument("dft_training: need 1 <= N <= T_d");
    }
    if (!(power > 0.0)) {
        throw std::invalid_argument("dft_training: power must be positive");
    }
    const double amp = std::sqrt(power / (static_cast<double>(T_d) * N));
    CMat X(N, T_d);
    for (int t = 0; t < T_d; ++t) {
        for (int m = 0; m < N; ++m) {
            // reduce m*t modulo T_d before forming the angle to keep the phase exact
            const long long k = (static_cast<long long>(m) * t) % T_d;
            X(m, t) = amp * std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / T_d);
        }
    }
    return {std::move(X), power, TrainingStage::direct};
}

TrainingMatrix random_training(Rng& rng, int N, int T_r, double power)
{
    if (N < 1 || T_r < N) {
        throw std::invalid_argument("random_training: need 1 <= N <= T_r");
    }
    if (!(power > 0.0)) {
        throw std::invalid_argument("random_training: power must be positive");
    }
    constexpr int kMaxAttempts = 16;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        CMat X = rng.complex_normal_matrix(N, T_r);
        if (numerical_rank(X) < N) {
            continue;
        }
        X *= std::sqrt(power / X.squaredNorm());
        return {std::move(X), power, TrainingStage::lis};
    }
    throw std::runtime_error("random_training: rank-deficient draws exhausted retries");
}

bool rows_distinct(const RMat& S)
{
    for (Eigen::Index a = 0; a < S.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < S.rows(); ++b) {
            if (S.row(a) == S.row(b)) {
                return false;
            }
        }
    }
    return true;
}

PhaseSchedule sparse_schedule(Rng& rng, int L, int T_r, double rho)
{
    if (L < 1 || T_r < 1) {
        throw std::invalid_argument("sparse_schedule: dimensions must be positive");
    }
    if (!(rho > 0.0) || rho > 1.0) {
        throw std::invalid_argument("sparse_schedule: rho must lie in (0, 1]");
    }
    const int K = active_elements(L, rho);
    if (K == 0) {
        throw std::invalid_argument("sparse_schedule: K = 0");
    }
    constexpr int kMaxAttempts = 64;
    std::vector<int> idx(L);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        PhaseSchedule sched;
        sched.S = RMat::Zero(L, T_r);
        sched.per_column_support.resize(T_r);
        sched.sparsity_rate = rho;
        sched.active_per_column = K;
        for (int t = 0; t < T_r; ++t) {
            std::iota(idx.begin(), idx.end(), 0);
            // partial Fisher-Yates: first K entries are a uniform K-subset
            for (int i = 0; i < K; ++i) {
                std::uniform_int_distribution<int> pick(i, L - 1);
                std::swap(idx[i], idx[pick(rng.engine())]);
            }
            std::vector<int> support(idx.begin(), idx.begin() + K);
            std::sort(support.begin(), support.end());
            for (int l : support) {
                sched.S(l, t) = 1.0;
            }
            sched.per_column_support[t] = std::move(support);
        }
        // with K == L every row is all-ones; distinctness is impossible and irrelevant
        if (K == L || L == 1 || rows_distinct(sched.S)) {
            return sched;
        }
    }
    throw std::runtime_error("sparse_schedule: could not draw a schedule with distinct rows");
}

} // namespace ris
