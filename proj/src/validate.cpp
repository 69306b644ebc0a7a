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

#include "ris/validate.hpp"

#include "ris/badvamp.hpp"
#include "ris/channel_model.hpp"
#include "ris/completion.hpp"

#include <algorithm>
#include <cmath>

namespace ris {

namespace {

CheckResult check(std::string name, double worst, double tol)
{
    return {std::move(name), worst <= tol, worst, tol};
}

double divergence_fd_error(Rng& rng)
{
    double worst = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const BgPrior prior{rng.uniform(0.05, 0.9), rng.complex_normal(0.5), rng.uniform(0.2, 5.0)};
        const double gamma = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
        const CVec r = rng.complex_normal_matrix(16, 1, 1.0 + prior.variance);
        const double div = bg_denoise_divergence(r, gamma, prior);
        cdouble fd{0.0, 0.0};
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            CVec rp = r, rm = r, ip = r, im = r;
            rp(i) += h;
            rm(i) -= h;
            ip(i) += cdouble(0.0, h);
            im(i) -= cdouble(0.0, h);
            const cdouble dx = (bg_denoise(rp, gamma, prior)(i) - bg_denoise(rm, gamma, prior)(i)) / (2.0 * h);
            const cdouble dy = (bg_denoise(ip, gamma, prior)(i) - bg_denoise(im, gamma, prior)(i)) / (2.0 * h);
            fd += 0.5 * (dx - cdouble(0.0, 1.0) * dy);
        }
        fd /= static_cast<double>(r.size());
        worst = std::max(worst, std::abs(fd - div) / std::max(1.0, std::abs(div)));
    }
    return worst;
}

double lmmse_stationarity(Rng& rng)
{
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int M = 12;
        const int L = 8;
        const CMat H = rng.complex_normal_matrix(M, L);
        const CVec y = rng.complex_normal_matrix(M, 1);
        const CVec r2 = rng.complex_normal_matrix(L, 1);
        const double g2 = rng.uniform(0.01, 10.0);
        const double w = rng.uniform(0.1, 100.0);
        const LmmseColumn out = lmmse_column(H, y, r2, g2, w);
        const CVec grad = g2 * (out.d2 - r2) - w * H.adjoint() * (y - H * out.d2);
        const double scale = (g2 * r2).norm() + w * (H.adjoint() * y).norm();
        worst = std::max(worst, grad.norm() / scale);
    }
    return worst;
}

double array_norm_error(Rng& rng)
{
    double worst = 0.0;
    for (int n : {1, 4, 16, 36, 64}) {
        for (double d : {0.5, 4.0}) {
            const UpaGeometry g = UpaGeometry::square_ish(n, d);
            for (int k = 0; k < 10; ++k) {
                const CVec a = array_response(g, rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.0, kPi));
                worst = std::max(worst, std::abs(a.norm() - 1.0));
            }
        }
    }
    return worst;
}

double recondition_error(Rng& rng)
{
    double worst = 0.0;
    for (double kappa : {1.0, 40.0, 100.0, 240.0}) {
        const CMat a = rng.complex_normal_matrix(16, 12);
        const CMat b = recondition(a, kappa);
        const double fro = std::abs(b.squaredNorm() / (16.0 * 12.0) - 1.0);
        const double cond = std::abs(condition_number(b) / kappa - 1.0);
        worst = std::max({worst, fro, cond});
    }
    return worst;
}

double eckart_young_error(Rng& rng)
{
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const CMat Q = rng.complex_normal_matrix(8, 6);
        const Eigen::JacobiSVD<CMat> svd(Q);
        const RVec& s = svd.singularValues();
        const double expected = s.tail(3).norm();
        const double got = (Q - hard_threshold_rank(Q, 3)).norm();
        worst = std::max(worst, std::abs(got - expected));
    }
    return worst;
}

} // namespace

std::vector<CheckResult> run_numerical_checks(std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<CheckResult> out;
    out.push_back(check("denoiser divergence vs finite differences", divergence_fd_error(rng), 1e-4));
    out.push_back(check("LMMSE stationarity residual", lmmse_stationarity(rng), 1e-8));
    out.push_back(check("array response unit norm", array_norm_error(rng), 1e-12));
    out.push_back(check("recondition Frobenius and condition number", recondition_error(rng), 1e-8));
    out.push_back(check("rank truncation Eckart-Young", eckart_young_error(rng), 1e-10));
    return out;
}

} // namespace ris
