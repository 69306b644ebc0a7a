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

#include "ris/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ris {

PhaseConfig PhaseConfig::uniform(int L, double phase)
{
    return {RVec::Constant(L, phase), RVec::Ones(L), {}};
}

PhaseConfig PhaseConfig::off(int L)
{
    return {RVec::Constant(L, 2.0 * kPi), RVec::Zero(L), {}};
}

PhaseConfig PhaseConfig::random(int L, Rng& rng)
{
    PhaseConfig p = uniform(L);
    for (int l = 0; l < L; ++l) {
        p.phases(l) = 2.0 * kPi - rng.uniform(0.0, 2.0 * kPi); // (0, 2pi]
    }
    return p;
}

CVec PhaseConfig::diagonal() const
{
    CVec d(phases.size());
    for (Eigen::Index l = 0; l < phases.size(); ++l) {
        d(l) = amplitudes(l) * std::polar(1.0, phases(l));
    }
    return d;
}

void PhaseConfig::validate() const
{
    if (phases.size() != amplitudes.size()) {
        throw std::invalid_argument("PhaseConfig: phases and amplitudes differ in length");
    }
    if (!phases.allFinite() || ((amplitudes.array() != 0.0) && (amplitudes.array() != 1.0)).any()) {
        throw std::invalid_argument("PhaseConfig: phases must be finite and amplitudes 0/1");
    }
}

namespace {

void check_shapes(const CMat& G_dl, Eigen::Index L, const CMat& H_dl, const CMat& Z_dl)
{
    if (G_dl.cols() != L || H_dl.rows() != L || G_dl.rows() != Z_dl.rows() || H_dl.cols() != Z_dl.cols()) {
        throw std::invalid_argument("phase design: shapes do not conform");
    }
}

double wrap_phase(double phi)
{
    double w = std::fmod(phi, 2.0 * kPi);
    if (w <= 0.0) {
        w += 2.0 * kPi;
    }
    return w;
}

} // namespace

CMat composite_channel(const CMat& G_dl, const PhaseConfig& phi, const CMat& H_dl, const CMat& Z_dl)
{
    phi.validate();
    check_shapes(G_dl, phi.phases.size(), H_dl, Z_dl);
    return G_dl * phi.diagonal().asDiagonal() * H_dl + Z_dl;
}

PhaseConfig optimal_phases(const CMat& G_dl, const CMat& H_dl, const CMat& Z_dl)
{
    check_shapes(G_dl, G_dl.cols(), H_dl, Z_dl);
    if (!G_dl.allFinite() || !H_dl.allFinite() || !Z_dl.allFinite()) {
        throw std::invalid_argument("optimal_phases: non-finite input");
    }
    const Eigen::Index L = G_dl.cols();
    const CMat ZH = Z_dl.conjugate() * H_dl.transpose(); // N x L
    PhaseConfig p = PhaseConfig::uniform(static_cast<int>(L));
    for (Eigen::Index l = 0; l < L; ++l) {
        const cdouble c = (G_dl.col(l).array() * ZH.col(l).array()).sum();
        if (c == cdouble{0.0, 0.0}) {
            p.flagged.push_back(static_cast<int>(l));
            continue;
        }
        p.phases(l) = wrap_phase(-std::arg(c));
    }
    return p;
}

PhaseConfig grid_search_phases(const CMat& G_dl, const CMat& H_dl, const CMat& Z_dl, int points_per_element,
                               int passes, const std::optional<PhaseConfig>& start)
{
    const Eigen::Index L = G_dl.cols();
    check_shapes(G_dl, L, H_dl, Z_dl);
    if (L > kGridSearchMaxElements) {
        throw std::invalid_argument("grid_search_phases: too many elements for exhaustive scanning");
    }
    if (points_per_element < 1 || passes < 1) {
        throw std::invalid_argument("grid_search_phases: need at least one point and one pass");
    }
    PhaseConfig p = start ? *start : PhaseConfig::uniform(static_cast<int>(L));
    p.validate();
    if (p.phases.size() != L) {
        throw std::invalid_argument("grid_search_phases: start has wrong length");
    }

    CMat delta = composite_channel(G_dl, p, H_dl, Z_dl);
    for (int pass = 0; pass < passes; ++pass) {
        for (Eigen::Index l = 0; l < L; ++l) {
            if (p.amplitudes(l) == 0.0) {
                continue;
            }
            const CMat B = G_dl.col(l) * H_dl.row(l);
            const CMat A = delta - std::polar(1.0, p.phases(l)) * B;
            // ||A + e^{j phi} B||^2 = const + 2 Re{e^{j phi} <A, B>}
            const cdouble cross = (A.conjugate().array() * B.array()).sum();
            double best_phase = p.phases(l);
            double best = std::real(std::polar(1.0, best_phase) * cross);
            for (int k = 1; k <= points_per_element; ++k) {
                const double phi = 2.0 * kPi * k / points_per_element;
                const double val = std::real(std::polar(1.0, phi) * cross);
                if (val > best) {
                    best = val;
                    best_phase = phi;
                }
            }
            p.phases(l) = best_phase;
            delta = A + std::polar(1.0, best_phase) * B;
        }
    }
    return p;
}

EigenmodeLink eigenmode(const CMat& channel, int streams)
{
    const Eigen::Index n = std::min(channel.rows(), channel.cols());
    if (streams < 1 || streams > n) {
        throw std::invalid_argument("eigenmode: streams must lie in [1, min(N, M)]");
    }
    Eigen::JacobiSVD<CMat> svd(channel, Eigen::ComputeThinU | Eigen::ComputeThinV);
    EigenmodeLink link;
    link.streams = streams;
    link.V = svd.matrixU().leftCols(streams);
    link.W = svd.matrixV().leftCols(streams);
    const RVec& s = svd.singularValues();
    const double tol = std::max(channel.rows(), channel.cols()) * std::numeric_limits<double>::epsilon() *
                       (s.size() > 0 ? s(0) : 0.0);
    link.rank_deficient = !(s(streams - 1) > tol);
    for (int k = 0; k < streams; ++k) {
        Eigen::Index idx = 0;
        link.V.col(k).cwiseAbs().maxCoeff(&idx);
        const cdouble v = link.V(idx, k);
        if (std::abs(v) > 0.0) {
            const cdouble rot = std::conj(v) / std::abs(v);
            link.V.col(k) *= rot;
            link.W.col(k) *= rot;
        }
    }
    return link;
}

double achievable_rate(const CMat& channel, const CMat& W, const CMat& V, double snr)
{
    if (!(snr > 0.0)) {
        throw std::invalid_argument("achievable_rate: snr must be positive");
    }
    if (channel.rows() != V.rows() || channel.cols() != W.rows() || W.cols() != V.cols()) {
        throw std::invalid_argument("achievable_rate: shapes do not conform");
    }
    const CMat E = V.adjoint() * channel * W;
    CMat A = snr * (E.adjoint() * E);
    A = 0.5 * (A + A.adjoint()).eval();
    A.diagonal().array() += 1.0;
    Eigen::LLT<CMat> llt(A);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("achievable_rate: matrix not positive definite");
    }
    const RVec diag = llt.matrixLLT().diagonal().real();
    return 2.0 * diag.array().log().sum() / std::log(2.0);
}

} // namespace ris
