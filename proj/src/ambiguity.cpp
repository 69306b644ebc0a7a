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

#include "ris/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace ris {

PermutationMap PermutationMap::identity(int L)
{
    PermutationMap p;
    p.perm.resize(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        p.perm[static_cast<std::size_t>(i)] = i;
    }
    return p;
}

bool PermutationMap::is_bijection() const
{
    std::vector<char> seen(perm.size(), 0);
    for (int v : perm) {
        if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)]) {
            return false;
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
    return true;
}

RMat state_matrix(const CMat& D_hat, double tau_rel)
{
    if (!(tau_rel > 0.0 && tau_rel < 1.0)) {
        throw std::invalid_argument("state_matrix: tau_rel must lie in (0, 1)");
    }
    RMat S = RMat::Zero(D_hat.rows(), D_hat.cols());
    for (Eigen::Index t = 0; t < D_hat.cols(); ++t) {
        const double peak = D_hat.col(t).cwiseAbs().maxCoeff();
        if (peak == 0.0) {
            continue;
        }
        for (Eigen::Index l = 0; l < D_hat.rows(); ++l) {
            if (std::abs(D_hat(l, t)) > tau_rel * peak) {
                S(l, t) = 1.0;
            }
        }
    }
    return S;
}

namespace {

// scores(n, n'): affinity of estimate row n to reference row n'.
PermutationMap greedy_assign(const RMat& scores)
{
    const Eigen::Index L = scores.rows();
    std::vector<std::tuple<double, int, int>> cand;
    cand.reserve(static_cast<std::size_t>(L * L));
    for (int n = 0; n < L; ++n) {
        for (int m = 0; m < L; ++m) {
            cand.emplace_back(scores(n, m), n, m);
        }
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) {
            return std::get<0>(a) > std::get<0>(b);
        }
        if (std::get<1>(a) != std::get<1>(b)) {
            return std::get<1>(a) < std::get<1>(b);
        }
        return std::get<2>(a) < std::get<2>(b);
    });

    PermutationMap p;
    p.perm.assign(static_cast<std::size_t>(L), -1);
    std::vector<char> used(static_cast<std::size_t>(L), 0);
    Eigen::Index assigned = 0;
    for (const auto& [score, n, m] : cand) {
        if (assigned == L) {
            break;
        }
        if (p.perm[static_cast<std::size_t>(n)] >= 0 || used[static_cast<std::size_t>(m)]) {
            continue;
        }
        p.perm[static_cast<std::size_t>(n)] = m;
        used[static_cast<std::size_t>(m)] = 1;
        ++assigned;
    }
    for (int n = 0; n < L; ++n) {
        if (!(scores.row(n).maxCoeff() > 0.0)) {
            p.degenerate_rows.push_back(n);
        }
    }
    return p;
}

} // namespace

PermutationMap recover_permutation(const RMat& S, const RMat& S_bar)
{
    if (S.rows() != S_bar.rows() || S.cols() != S_bar.cols()) {
        throw std::invalid_argument("recover_permutation: shape mismatch");
    }
    PermutationMap p = greedy_assign(S_bar * S.transpose());
    p.source = PermutationSource::recovered;
    return p;
}

PermutationMap oracle_permutation(const CMat& D_hat, const CMat& D_true)
{
    if (D_hat.rows() != D_true.rows() || D_hat.cols() != D_true.cols()) {
        throw std::invalid_argument("oracle_permutation: shape mismatch");
    }
    RMat scores = (D_hat * D_true.adjoint()).cwiseAbs();
    for (Eigen::Index n = 0; n < scores.rows(); ++n) {
        const double a = D_hat.row(n).norm();
        for (Eigen::Index m = 0; m < scores.cols(); ++m) {
            const double denom = a * D_true.row(m).norm();
            scores(n, m) = denom > 0.0 ? scores(n, m) / denom : 0.0;
        }
    }
    PermutationMap p = greedy_assign(scores);
    p.source = PermutationSource::ground_truth;
    return p;
}

PermutedChannels apply_permutation(const CMat& H_hat, const CMat& D_hat, const PermutationMap& p)
{
    const auto L = static_cast<Eigen::Index>(p.perm.size());
    if (H_hat.cols() != L || D_hat.rows() != L || !p.is_bijection()) {
        throw std::invalid_argument("apply_permutation: invalid permutation or shapes");
    }
    PermutedChannels out{CMat(H_hat.rows(), L), CMat(L, D_hat.cols())};
    for (Eigen::Index n = 0; n < L; ++n) {
        const int m = p.perm[static_cast<std::size_t>(n)];
        out.H.col(m) = H_hat.col(n);
        out.D.row(m) = D_hat.row(n);
    }
    return out;
}

double nmse_ambiguity_aware(const CMat& H_true, const CMat& H_hat, const PermutationMap& p)
{
    const auto L = static_cast<Eigen::Index>(p.perm.size());
    if (H_true.rows() != H_hat.rows() || H_true.cols() != L || H_hat.cols() != L || !p.is_bijection()) {
        throw std::invalid_argument("nmse_ambiguity_aware: invalid permutation or shapes");
    }
    const double ref = H_true.squaredNorm();
    if (!(ref > 0.0)) {
        throw std::invalid_argument("nmse_ambiguity_aware: zero reference");
    }
    double err = 0.0;
    for (Eigen::Index n = 0; n < L; ++n) {
        const auto h = H_true.col(p.perm[static_cast<std::size_t>(n)]);
        const auto e = H_hat.col(n);
        const double en = e.squaredNorm();
        const cdouble c = en > 0.0 ? e.dot(h) / en : cdouble{0.0, 0.0};
        err += (h - c * e).squaredNorm();
    }
    return std::max(10.0 * std::log10(std::max(err / ref, 1e-300)), -300.0);
}

} // namespace ris
