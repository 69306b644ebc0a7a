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

#include "ris/direct_estimation.hpp"
#include "ris/training.hpp"

#include <cmath>

using namespace ris;

TEST_CASE("stage-1 observation")
{
    Rng rng(1);
    const CMat Z = rng.complex_normal_matrix(6, 4);
    const CMat X = dft_training(4, 8, 8.0).X;

    Rng a(2);
    CHECK(simulate_stage1(a, Z, X, 0.0).Y_a == Z * X);

    Rng b(3), c(3);
    CHECK(simulate_stage1(b, Z, X, 0.5).Y_a == simulate_stage1(c, Z, X, 0.5).Y_a);

    // sample variance of the noise over 10^4 entries
    Rng d(4);
    const CMat big = dft_training(4, 2500, 2500.0).X;
    const CMat noise = simulate_stage1(d, CMat::Zero(4, 4), big, 0.3).Y_a;
    CHECK(std::abs(noise.squaredNorm() / noise.size() / 0.3 - 1.0) < 0.05);

    CHECK_THROWS(simulate_stage1(a, Z, dft_training(3, 8, 1.0).X, 0.0));
    CHECK_THROWS(simulate_stage1(a, Z, X, -1.0));
}

TEST_CASE("RMMSE estimate")
{
    SUBCASE("noiseless square DFT is exact")
    {
        Rng rng(1);
        const CMat Z = rng.complex_normal_matrix(16, 16);
        const CMat X = dft_training(16, 16, 16.0).X;
        CHECK(nmse_db(Z, rmmse_estimate(Z * X, X, 0.0)) < -250.0);
    }
    SUBCASE("scalar shrinkage")
    {
        CMat y(1, 1), x(1, 1);
        y(0, 0) = cdouble(3.0, -1.0);
        x(0, 0) = 1.0;
        CHECK(std::abs(rmmse_estimate(y, x, 1.0)(0, 0) - y(0, 0) / 2.0) < 1e-15);
    }
    SUBCASE("matches the T_d x T_d form")
    {
        Rng rng(2);
        const CMat X = random_training(rng, 3, 7, 5.0).X;
        const CMat Y = rng.complex_normal_matrix(4, 7);
        const double s2 = 0.4;
        const CMat direct =
            Y * (X.adjoint() * X + s2 * CMat::Identity(7, 7)).inverse() * X.adjoint();
        CHECK((rmmse_estimate(Y, X, s2) - direct).norm() < 1e-12 * direct.norm());
    }
    SUBCASE("linear in Y")
    {
        Rng rng(3);
        const CMat X = random_training(rng, 3, 7, 5.0).X;
        const CMat Y1 = rng.complex_normal_matrix(4, 7), Y2 = rng.complex_normal_matrix(4, 7);
        const cdouble a(0.3, -2.0);
        const CMat lhs = rmmse_estimate(a * Y1 + Y2, X, 0.2);
        const CMat rhs = a * rmmse_estimate(Y1, X, 0.2) + rmmse_estimate(Y2, X, 0.2);
        CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
    SUBCASE("Monte-Carlo MSE matches the closed form")
    {
        // X X^H = a I, so Z_hat - Z = -Z s2/(a+s2) + N X^H/(a+s2) and
        // E||Z_hat - Z||^2 = ||Z||^2 s2^2/(a+s2)^2 + M s2 p/(a+s2)^2.
        const int M = 8, N = 8, T = 8;
        const double p = T, s2 = 0.1, a = p / N;
        const CMat X = dft_training(N, T, p).X;
        Rng rng(9);
        double err = 0.0, expect = 0.0, energy = 0.0;
        for (int i = 0; i < 500; ++i) {
            const CMat Z = rng.complex_normal_matrix(M, N);
            const CMat Zh = rmmse_estimate(simulate_stage1(rng, Z, X, s2).Y_a, X, s2);
            err += (Zh - Z).squaredNorm();
            energy += Z.squaredNorm();
            expect += (Z.squaredNorm() * s2 * s2 + M * s2 * p) / ((a + s2) * (a + s2));
        }
        CHECK(std::abs(err / expect - 1.0) < 0.03);
        MESSAGE("NMSE " << 10 * std::log10(err / energy) << " dB, predicted " << 10 * std::log10(expect / energy));
    }
    SUBCASE("NMSE non-increasing in SNR")
    {
        const CMat X = dft_training(8, 8, 8.0).X;
        double prev = 1e9;
        for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0}) {
            const double s2 = std::pow(10.0, -snr_db / 10.0);
            Rng rng(11);
            double err = 0.0, energy = 0.0;
            for (int i = 0; i < 200; ++i) {
                const CMat Z = rng.complex_normal_matrix(8, 8);
                err += (rmmse_estimate(simulate_stage1(rng, Z, X, s2).Y_a, X, s2) - Z).squaredNorm();
                energy += Z.squaredNorm();
            }
            CHECK(err / energy <= prev);
            prev = err / energy;
        }
    }
    CMat X(3, 2);
    X.setOnes();
    CHECK_THROWS(rmmse_estimate(CMat::Zero(2, 2), X, 0.1));
    CHECK_THROWS(rmmse_estimate(CMat::Zero(2, 3), X, 0.1));
    CMat rank1 = CMat::Ones(2, 4);
    CHECK_THROWS(rmmse_estimate(CMat::Zero(2, 4), rank1, 0.0));
}

TEST_CASE("stage-2 error variance")
{
    CHECK(stage2_error_variance(0.0, 64, 1.0) == 0.0);
    CHECK(std::abs(stage2_error_variance(1.0, 1, 1.0) - 0.5) < 1e-15);
    CHECK(std::abs(stage2_error_variance(0.1, 64, 1.0) - 6.4 / 7.4) < 1e-12);
    CHECK_THROWS(stage2_error_variance(0.1, 4, 0.0));
}
