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

#include "ris/channel_model.hpp"

#include <cmath>

using namespace ris;

namespace {

RVec singular_values(const CMat& a)
{
    return Eigen::JacobiSVD<CMat>(a).singularValues();
}

} // namespace

TEST_CASE("array response has unit norm")
{
    Rng rng(3);
    for (int n : {1, 2, 7, 16, 64}) {
        for (double d : {0.5, 4.0}) {
            const UpaGeometry g = UpaGeometry::square_ish(n, d);
            CHECK(g.size() == n);
            for (int k = 0; k < 20; ++k) {
                const CVec a = array_response(g, rng.uniform(0, 2 * kPi), rng.uniform(0, kPi));
                CHECK(std::abs(a.norm() - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("array response of a ULA along y is a Vandermonde vector")
{
    // width x 1 array: consecutive elements differ by exp(j 2 pi d sin(az) sin(el))
    UpaGeometry g{5, 1, 0.5};
    const double az = 0.7, el = 1.1;
    const CVec a = array_response(g, az, el);
    const cdouble step = a(1) / a(0);
    CHECK(std::abs(std::abs(step) - 1.0) < 1e-12);
    for (int i = 1; i < 5; ++i) {
        CHECK(std::abs(a(i) / a(i - 1) - step) < 1e-12);
    }
    CHECK(std::abs(std::abs(std::arg(step)) - std::abs(std::remainder(kPi * std::sin(az) * std::sin(el), 2 * kPi))) <
          1e-12);
}

TEST_CASE("single path gives a rank-1 channel")
{
    Rng rng(11);
    GeometricChannelSpec spec{1, 10.0, std::nullopt, std::nullopt};
    const CMat h = gen_geometric_channel(rng, UpaGeometry::square_ish(8), UpaGeometry::square_ish(6), spec);
    CHECK(h.rows() == 8);
    CHECK(h.cols() == 6);
    CHECK(numerical_rank(h) == 1);
}

TEST_CASE("mean channel energy equals N_rx N_tx")
{
    Rng rng(5);
    GeometricChannelSpec spec{16, 10.0, std::nullopt, std::nullopt};
    const UpaGeometry rx = UpaGeometry::square_ish(4), tx = UpaGeometry::square_ish(6);
    double acc = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        acc += gen_geometric_channel(rng, rx, tx, spec).squaredNorm();
    }
    const double ratio = acc / draws / 24.0;
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
}

TEST_CASE("wide spread with min(N_rx, N_tx) paths gives full rank")
{
    Rng rng(21);
    GeometricChannelSpec spec{4, 60.0, std::nullopt, std::nullopt};
    int full = 0;
    for (int i = 0; i < 50; ++i) {
        full += numerical_rank(gen_geometric_channel(rng, UpaGeometry::square_ish(16), UpaGeometry::square_ish(4), spec)) ==
                4;
    }
    CHECK(full >= 48);
}

TEST_CASE("recondition")
{
    SUBCASE("kappa 1 is isotropic")
    {
        Rng rng(1);
        const CMat r = recondition(rng.complex_normal_matrix(5, 3), 1.0);
        const RVec s = singular_values(r);
        CHECK(s.maxCoeff() - s.minCoeff() < 1e-12);
        CHECK(std::abs(r.squaredNorm() - 15.0) < 1e-10);
    }
    SUBCASE("2x2 hand example")
    {
        CMat a = CMat::Zero(2, 2);
        a(0, 0) = 4.0;
        a(1, 1) = 1.0;
        const RVec s = singular_values(recondition(a, 2.0));
        // s^2 + s^2/4 = 4
        const double expect = std::sqrt(16.0 / 5.0);
        CHECK(std::abs(s(0) - expect) < 1e-12);
        CHECK(std::abs(s(1) - expect / 2.0) < 1e-12);
    }
    SUBCASE("random 64x64, kappa 100, singular subspaces kept")
    {
        Rng rng(2);
        const CMat a = rng.complex_normal_matrix(64, 64);
        const CMat r = recondition(a, 100.0);
        CHECK(std::abs(condition_number(r) - 100.0) < 1e-7);
        CHECK(std::abs(r.squaredNorm() / (64.0 * 64.0) - 1.0) < 1e-9);

        Eigen::JacobiSVD<CMat> sa(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::JacobiSVD<CMat> sr(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
        // same ordering of directions: |<u_i, u'_i>| = 1
        for (int i = 0; i < 64; ++i) {
            CHECK(std::abs(std::abs(sa.matrixU().col(i).dot(sr.matrixU().col(i))) - 1.0) < 1e-6);
            CHECK(std::abs(std::abs(sa.matrixV().col(i).dot(sr.matrixV().col(i))) - 1.0) < 1e-6);
        }
        // log-spaced ramp
        const RVec s = sr.singularValues();
        for (int i = 1; i < 64; ++i) {
            CHECK(std::abs(std::log(s(i - 1) / s(i)) - std::log(100.0) / 63.0) < 1e-9);
        }
    }
    SUBCASE("rectangular")
    {
        Rng rng(4);
        const CMat r = recondition(rng.complex_normal_matrix(12, 5), 30.0);
        CHECK(std::abs(condition_number(r) - 30.0) < 1e-9 * 30.0);
        CHECK(std::abs(r.squaredNorm() - 60.0) < 1e-9 * 60.0);
    }
    SUBCASE("rejects bad input")
    {
        CHECK_THROWS(recondition(CMat::Zero(3, 3), 2.0));
        Rng rng(5);
        CHECK_THROWS(recondition(rng.complex_normal_matrix(3, 3), 0.5));
    }
}

TEST_CASE("channel set")
{
    SUBCASE("default specs: rank(G) = 8, kappa(H) = 100")
    {
        Rng rng(8);
        const ChannelTriple t = gen_channel_set(rng, {32, 32, 32}, ChannelSetSpec{});
        CHECK(t.H.rows() == 32);
        CHECK(t.H.cols() == 32);
        CHECK(t.G.rows() == 32);
        CHECK(t.G.cols() == 32);
        CHECK(t.Z.rows() == 32);
        CHECK(t.Z.cols() == 32);
        CHECK(numerical_rank(t.G) == 8);
        CHECK(std::abs(condition_number(t.H) - 100.0) < 1e-6);
    }
    SUBCASE("shapes with distinct dimensions")
    {
        ChannelSetSpec s;
        s.G.target_rank = 2;
        Rng rng(9);
        const ChannelTriple t = gen_channel_set(rng, {6, 4, 9}, s);
        CHECK(numerical_rank(t.G) == 2);
        CHECK(t.H.rows() == 6);
        CHECK(t.H.cols() == 9);
        CHECK(t.G.rows() == 9);
        CHECK(t.G.cols() == 4);
        CHECK(t.Z.rows() == 4);
        CHECK(t.Z.cols() == 6);
        CHECK(t.direct_uplink().rows() == 6);
    }
    SUBCASE("2x2x2 single paths are rank 1")
    {
        ChannelSetSpec s;
        s.Z = {1, 10.0, std::nullopt, std::nullopt};
        s.H = {1, 10.0, std::nullopt, std::nullopt};
        s.G = {1, 10.0, std::nullopt, std::nullopt};
        Rng rng(10);
        const ChannelTriple t = gen_channel_set(rng, {2, 2, 2}, s);
        CHECK(numerical_rank(t.Z) == 1);
        CHECK(numerical_rank(t.H) == 1);
        CHECK(numerical_rank(t.G) == 1);
    }
    SUBCASE("deterministic")
    {
        Rng a(77), b(77);
        ChannelSetSpec s;
        s.G.target_rank = 4;
        const ChannelTriple x = gen_channel_set(a, {8, 4, 8}, s);
        const ChannelTriple y = gen_channel_set(b, {8, 4, 8}, s);
        CHECK(x.H == y.H);
        CHECK(x.G == y.G);
        CHECK(x.Z == y.Z);
    }
}
