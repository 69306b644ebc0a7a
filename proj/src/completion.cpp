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

#include "ris/completion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ris {

void CompletionProblem::validate() const
{
    if (D_check.rows() != mask.rows() || D_check.cols() != mask.cols() || X_b.cols() != D_check.cols()) {
        throw std::invalid_argument("CompletionProblem: shapes do not conform");
    }
    if (rank < 1 || rank > std::min(D_check.rows(), D_check.cols())) {
        throw std::invalid_argument("CompletionProblem: rank out of range");
    }
    if (max_iter < 0 || stagnation_window < 1) {
        throw std::invalid_argument("CompletionProblem: invalid iteration limits");
    }
    if (((mask.array() != 0.0) && (mask.array() != 1.0)).any()) {
        throw std::invalid_argument("CompletionProblem: mask must be 0/1");
    }
}

CMat hard_threshold_rank(const CMat& Q, int r)
{
    if (r < 1) {
        throw std::invalid_argument("hard_threshold_rank: r must be >= 1");
    }
    const Eigen::Index k = std::min<Eigen::Index>(r, std::min(Q.rows(), Q.cols()));
    if (k == 0) {
        return Q;
    }
    Eigen::BDCSVD<CMat> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU().leftCols(k) * svd.singularValues().head(k).cast<cdouble>().asDiagonal() *
           svd.matrixV().leftCols(k).adjoint();
}

namespace {

struct Truncation {
    CMat low_rank;
    CMat U;
};

Truncation truncate(const CMat& Q, int r)
{
    const Eigen::Index k = std::min<Eigen::Index>(r, std::min(Q.rows(), Q.cols()));
    Eigen::BDCSVD<CMat> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Truncation t;
    t.U = svd.matrixU().leftCols(k);
    t.low_rank = t.U * svd.singularValues().head(k).cast<cdouble>().asDiagonal() * svd.matrixV().leftCols(k).adjoint();
    return t;
}

} // namespace

CompletionResult niht(const CompletionProblem& problem)
{
    problem.validate();
    const CMat& D = problem.D_check;
    const auto Sc = problem.mask.cast<cdouble>();
    const Eigen::Index L = D.rows();
    const Eigen::Index T = D.cols();
    const Eigen::Index N = problem.X_b.rows();
    const int r = problem.rank;

    CompletionResult out;
    const double observed = problem.mask.sum();
    out.undersampled = observed < static_cast<double>(r) * static_cast<double>(L + N - r);

    // F = G X_b lives in the row space of X_b. With X_b^H = Q R (thin), F = Ft Q^H
    // and G = Ft R^{-H}; iterate on the L x N coordinates Ft.
    if (N > T) {
        throw std::invalid_argument("niht: X_b must have full row rank");
    }
    Eigen::HouseholderQR<CMat> qr(problem.X_b.adjoint());
    const CMat Q = qr.householderQ() * CMat::Identity(T, N);
    const CMat R = qr.matrixQR().topRows(N).triangularView<Eigen::Upper>();
    const RVec rdiag = R.diagonal().cwiseAbs();
    if (!(rdiag.minCoeff() > 1e-12 * rdiag.maxCoeff())) {
        throw std::runtime_error("niht: rank-deficient pilot Gram");
    }

    Truncation cur = truncate(Sc.cwiseProduct(D) * Q, r);
    CMat residual = Sc.cwiseProduct(D - cur.low_rank * Q.adjoint());
    out.residual_history.push_back(residual.norm());

    for (int j = 0; j < problem.max_iter; ++j) {
        if (out.residual_history.back() < problem.residual_tol) {
            break;
        }
        const CMat grad = residual * Q;
        const CMat proj = cur.U * (cur.U.adjoint() * grad);
        const double num = proj.squaredNorm();
        const double den = Sc.cwiseProduct(proj * Q.adjoint()).squaredNorm();
        if (!(den > 0.0)) {
            break;
        }
        cur = truncate(cur.low_rank + (num / den) * grad, r);
        residual = Sc.cwiseProduct(D - cur.low_rank * Q.adjoint());
        out.residual_history.push_back(residual.norm());
        out.iterations = j + 1;

        const std::size_t n = out.residual_history.size();
        const auto w = static_cast<std::size_t>(problem.stagnation_window);
        if (n > w) {
            const double prev = out.residual_history[n - 1 - w];
            if (prev > 0.0 && std::abs(prev - out.residual_history.back()) < problem.stagnation_tol * prev) {
                break;
            }
        }
    }

    out.F = cur.low_rank * Q.adjoint();
    // G R^H = Ft
    out.G = R.triangularView<Eigen::Upper>().adjoint().solve<Eigen::OnTheRight>(cur.low_rank);
    return out;
}

} // namespace ris
