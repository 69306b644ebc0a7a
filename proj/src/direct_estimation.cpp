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

#include "ris/direct_estimation.hpp"

#include <stdexcept>

namespace ris {

Stage1Observation simulate_stage1(Rng& rng, const CMat& Z_up, const CMat& X_a, double noise_var)
{
    if (Z_up.cols() != X_a.rows()) {
        throw std::invalid_argument("simulate_stage1: Z and X_a shapes do not conform");
    }
    if (noise_var < 0.0) {
        throw std::invalid_argument("simulate_stage1: negative noise variance");
    }
    Stage1Observation obs;
    obs.Y_a = Z_up * X_a;
    if (noise_var > 0.0) {
        obs.Y_a += rng.complex_normal_matrix(obs.Y_a.rows(), obs.Y_a.cols(), noise_var);
    }
    obs.noise_var = noise_var;
    return obs;
}

CMat rmmse_estimate(const CMat& Y_a, const CMat& X_a, double noise_var)
{
    if (Y_a.cols() != X_a.cols()) {
        throw std::invalid_argument("rmmse_estimate: Y_a and X_a need the same number of columns");
    }
    if (X_a.cols() < X_a.rows()) {
        throw std::invalid_argument("rmmse_estimate: need T_d >= N");
    }
    // (X^H X + s2 I_T)^{-1} X^H == X^H (X X^H + s2 I_N)^{-1}; the N x N form stays
    // nonsingular at s2 = 0 whenever X_a has full row rank.
    CMat gram = X_a * X_a.adjoint();
    gram.diagonal().array() += noise_var;
    Eigen::LDLT<CMat> ldlt(gram);
    const double min_pivot = ldlt.vectorD().cwiseAbs().minCoeff();
    const double max_pivot = ldlt.vectorD().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(min_pivot > 1e-14 * max_pivot)) {
        throw std::runtime_error("rmmse_estimate: singular Gram system");
    }
    // Z = (Y X^H) G^{-1}, so Z^H = G^{-1} (X Y^H) because G is Hermitian
    const CMat rhs = X_a * Y_a.adjoint(); // N x M
    return ldlt.solve(rhs).adjoint();
}

double stage2_error_variance(double noise_var, int M, double power)
{
    if (noise_var < 0.0 || M < 0 || !(power > 0.0)) {
        throw std::invalid_argument("stage2_error_variance: invalid arguments");
    }
    const double num = noise_var * M;
    return num / (power + num);
}

} // namespace ris
