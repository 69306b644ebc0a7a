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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ris/ambiguity.hpp"
#include "ris/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ris;

namespace {

std::vector<int> random_perm(Rng& rng, int L)
{
    std::vector<int> p(static_cast<std::size_t>(L));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng.engine());
    return p;
}

// Row n of the result is row perm[n] of A.
RMat permute_rows(const RMat& A, const std::vector<int>& perm)
{
    RMat out(A.rows(), A.cols());
    for (std::size_t n = 0; n < perm.size(); ++n) {
        out.row(static_cast<Eigen::Index>(n)) = A.row(perm[n]);
    }
    return out;
}

} // namespace

TEST_CASE("state matrix")
{
    CMat D(3, 3);
    D << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0;
    for (double tau : {0.01, 0.5, 0.99}) {
        const RMat s = state_matrix(D, tau);
        CHECK(s == D.real());
    }
    CHECK(state_matrix(D).col(2).sum() == 0.0);
    CHECK_THROWS(state_matrix(D, 0.0));
    CHECK_THROWS(state_matrix(D, 1.0));

    SUBCASE("noisy columns with 20 dB on/off separation")
    {
        Rng rng(4);
        const PhaseSchedule S = sparse_schedule(rng, 64, 200, 0.1);
        CMat noisy(64, 200);
        for (int t = 0; t < 200; ++t) {
            for (int l = 0; l < 64; ++l) {
                // ON entries have magnitude in [1, 2]; OFF entries at most 0.1 of the smallest ON
                noisy(l, t) = S.S(l, t) == 1.0 ? std::polar(rng.uniform(1.0, 2.0), rng.uniform(0, 2 * kPi))
                                               : std::polar(rng.uniform(0.0, 0.1), rng.uniform(0, 2 * kPi));
            }
        }
        CHECK(state_matrix(noisy, 0.1) == S.S);
    }
}

TEST_CASE("permutation recovery")
{
    Rng rng(1);
    const PhaseSchedule S = sparse_schedule(rng, 6, 30, 0.5);
    SUBCASE("identity")
    {
        const PermutationMap p = recover_permutation(S.S, S.S);
        CHECK(p.perm == PermutationMap::identity(6).perm);
        CHECK(p.source == PermutationSource::recovered);
        CHECK(p.degenerate_rows.empty());
    }
    SUBCASE("swapped rows 0 and 1")
    {
        RMat Sb = S.S;
        Sb.row(0) = S.S.row(1);
        Sb.row(1) = S.S.row(0);
        CHECK(recover_permutation(S.S, Sb).perm == std::vector<int>{1, 0, 2, 3, 4, 5});
    }
    SUBCASE("all-zero estimate rows are flagged but still assigned")
    {
        RMat Sb = S.S;
        Sb.row(3).setZero();
        const PermutationMap p = recover_permutation(S.S, Sb);
        CHECK(p.is_bijection());
        CHECK(p.degenerate_rows == std::vector<int>{3});
        CHECK(p.perm[3] == 3);
    }
    SUBCASE("exhaustive over all permutations of 8 rows")
    {
        Rng r(2);
        const PhaseSchedule S8 = sparse_schedule(r, 8, 24, 0.5);
        std::vector<int> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        int wrong = 0, count = 0;
        do {
            wrong += recover_permutation(S8.S, permute_rows(S8.S, perm)).perm != perm;
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(count == 40320);
        CHECK(wrong == 0);
    }
    SUBCASE("random large schedules")
    {
        for (int i = 0; i < 50; ++i) {
            const PhaseSchedule s = sparse_schedule(rng, 64, 500, 0.1);
            const std::vector<int> perm = random_perm(rng, 64);
            CHECK(recover_permutation(s.S, permute_rows(s.S, perm)).perm == perm);
        }
    }
    SUBCASE("greedy resolves duplicate argmax to a bijection")
    {
        RMat ref(3, 4), est(3, 4);
        ref << 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1;
        est << 1, 1, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1; // rows 0 and 1 both prefer reference row 1
        const PermutationMap p = recover_permutation(ref, est);
        CHECK(p.is_bijection());
        CHECK(p.perm == std::vector<int>{1, 0, 2});
    }
    CHECK_THROWS(recover_permutation(S.S, RMat::Zero(5, 30)));
}

TEST_CASE("apply permutation")
{
    Rng rng(3);
    const CMat H = rng.complex_normal_matrix(5, 6), D = rng.complex_normal_matrix(6, 9);
    const PermutedChannels same = apply_permutation(H, D, PermutationMap::identity(6));
    CHECK(same.H == H);
    CHECK(same.D == D);

    const std::vector<int> perm = random_perm(rng, 6);
    // planted estimate: estimate row n is reference row perm[n]
    CMat Hh(5, 6), Dh(6, 9);
    for (int n = 0; n < 6; ++n) {
        Hh.col(n) = H.col(perm[n]);
        Dh.row(n) = D.row(perm[n]);
    }
    PermutationMap p;
    p.perm = perm;
    const PermutedChannels back = apply_permutation(Hh, Dh, p);
    CHECK(back.H == H);
    CHECK(back.D == D);
    CHECK((back.H * back.D - Hh * Dh).norm() < 1e-12 * (Hh * Dh).norm());

    PermutationMap bad;
    bad.perm = {0, 0, 1, 2, 3, 4};
    CHECK_FALSE(bad.is_bijection());
    CHECK_THROWS(apply_permutation(H, D, bad));
}

TEST_CASE("oracle permutation")
{
    Rng rng(4);
    const CMat D = rng.complex_normal_matrix(7, 40);
    const std::vector<int> perm = random_perm(rng, 7);
    CMat Dh(7, 40);
    for (int n = 0; n < 7; ++n) {
        Dh.row(n) = std::polar(0.1 + n, 0.3 * n) * D.row(perm[n]);
    }
    const PermutationMap p = oracle_permutation(Dh, D);
    CHECK(p.perm == perm);
    CHECK(p.source == PermutationSource::ground_truth);
}

TEST_CASE("ambiguity-aware NMSE")
{
    Rng rng(5);
    const CMat H = rng.complex_normal_matrix(8, 5);
    CHECK(nmse_ambiguity_aware(H, H, PermutationMap::identity(5)) <= -300.0);
    CHECK(nmse_ambiguity_aware(H, 2.0 * H, PermutationMap::identity(5)) <= -300.0);

    const std::vector<int> perm = random_perm(rng, 5);
    CMat Hh(8, 5);
    for (int n = 0; n < 5; ++n) {
        Hh.col(n) = std::polar(rng.uniform(0.5, 3.0), rng.uniform(0, 2 * kPi)) * H.col(perm[n]);
    }
    PermutationMap p;
    p.perm = perm;
    CHECK(nmse_ambiguity_aware(H, Hh, p) <= -300.0);
    CHECK(nmse_ambiguity_aware(H, Hh, PermutationMap::identity(5)) > -10.0);

    SUBCASE("orthogonal perturbation of relative size eps")
    {
        // each column gets an error orthogonal to it, so the fitted scalar cannot absorb it:
        // NMSE = eps^2 / (1 + eps^2)
        const double eps = 0.1;
        CMat E = rng.complex_normal_matrix(8, 5);
        for (int l = 0; l < 5; ++l) {
            const CVec h = H.col(l);
            CVec e = E.col(l) - h * (h.dot(E.col(l)) / h.squaredNorm());
            E.col(l) = e * (eps * h.norm() / e.norm());
        }
        const double got = nmse_ambiguity_aware(H, H + E, PermutationMap::identity(5));
        CHECK(std::abs(got - 20.0 * std::log10(eps)) < 0.5);
        CHECK(std::abs(got - 10.0 * std::log10(eps * eps / (1.0 + eps * eps))) < 1e-9);
    }
    SUBCASE("zero estimate column")
    {
        CMat Z = H;
        Z.col(2).setZero();
        const double expect = 10.0 * std::log10(H.col(2).squaredNorm() / H.squaredNorm());
        CHECK(std::abs(nmse_ambiguity_aware(H, Z, PermutationMap::identity(5)) - expect) < 1e-9);
    }
    CHECK_THROWS(nmse_ambiguity_aware(CMat::Zero(8, 5), H, PermutationMap::identity(5)));
}
