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

#include "ris/badvamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ris {

void BgPrior::validate() const
{
    if (!(sparsity > 0.0) || sparsity > 1.0) {
        throw std::invalid_argument("BgPrior: sparsity must lie in (0, 1]");
    }
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(std::abs(mean))) {
        throw std::invalid_argument("BgPrior: variance must be positive and parameters finite");
    }
}

void BadvampConfig::validate() const
{
    if (max_iters < 1 || inner_em_iters < 0 || inner_lmmse_iters < 0 || restarts < 1) {
        throw std::invalid_argument("BadvampConfig: iteration counts out of range");
    }
    if (!(gamma_floor > 0.0) || !(init_gamma > 0.0) || !(init_r_var > 0.0)) {
        throw std::invalid_argument("BadvampConfig: gamma_floor, init_gamma and init_r_var must be positive");
    }
    if (!(damping > 0.0) || damping > 1.0) {
        throw std::invalid_argument("BadvampConfig: damping must lie in (0, 1]");
    }
    if (noise_var < 0.0 || !(initial_snr > 0.0) || anneal_hold < 0 || !(anneal_growth >= 1.0)) {
        throw std::invalid_argument("BadvampConfig: invalid noise-precision schedule");
    }
}

CMat simulate_stage2(Rng& rng, const CMat& H, const CMat& G, const RMat& S, const CMat& X_b,
                     double noise_var, double error_var)
{
    if (H.cols() != G.rows() || G.cols() != X_b.rows() || S.rows() != G.rows() || S.cols() != X_b.cols()) {
        throw std::invalid_argument("simulate_stage2: shapes do not conform");
    }
    if (noise_var < 0.0 || error_var < 0.0) {
        throw std::invalid_argument("simulate_stage2: negative variance");
    }
    const CMat D = S.cast<cdouble>().cwiseProduct(G * X_b);
    CMat Y = H * D;
    const double total = noise_var + error_var;
    if (total > 0.0) {
        Y += rng.complex_normal_matrix(Y.rows(), Y.cols(), total);
    }
    return Y;
}

namespace {

struct PosteriorMoments {
    cdouble mean;
    double var;
};

PosteriorMoments bg_moments(cdouble r, double gamma, const BgPrior& p)
{
    const double vg = p.variance * gamma;
    const cdouble m_on = (vg * r + p.mean) / (1.0 + vg);
    const double v_on = p.variance / (1.0 + vg);
    double pi_on = 1.0;
    if (p.sparsity < 1.0) {
        const double s_on = p.variance + 1.0 / gamma;
        const double log_on = -std::log(s_on) - std::norm(r - p.mean) / s_on;
        const double log_off = std::log(gamma) - gamma * std::norm(r);
        const double llr = std::log(p.sparsity / (1.0 - p.sparsity)) + log_on - log_off;
        pi_on = llr >= 0.0 ? 1.0 / (1.0 + std::exp(-llr)) : std::exp(llr) / (1.0 + std::exp(llr));
    }
    return {pi_on * m_on, pi_on * v_on + pi_on * (1.0 - pi_on) * std::norm(m_on)};
}

void check_gamma(double gamma)
{
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("denoiser precision must be positive");
    }
}

/// Denoise one column in place; returns the divergence.
double denoise_column(const CVec& r, double gamma, const BgPrior& prior, CVec& out)
{
    out.resize(r.size());
    double var_sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const PosteriorMoments pm = bg_moments(r(i), gamma, prior);
        out(i) = pm.mean;
        var_sum += pm.var;
    }
    return r.size() > 0 ? gamma * var_sum / static_cast<double>(r.size()) : 0.0;
}

} // namespace

CVec bg_denoise(const CVec& r, double gamma, const BgPrior& prior)
{
    check_gamma(gamma);
    prior.validate();
    CVec out;
    denoise_column(r, gamma, prior, out);
    return out;
}

double bg_denoise_divergence(const CVec& r, double gamma, const BgPrior& prior)
{
    check_gamma(gamma);
    prior.validate();
    CVec out;
    return denoise_column(r, gamma, prior, out);
}

LmmseColumn lmmse_column(const CMat& H, const CVec& y, const CVec& r2, double gamma2, double noise_precision)
{
    if (H.rows() != y.size() || H.cols() != r2.size()) {
        throw std::invalid_argument("lmmse_column: shapes do not conform");
    }
    if (!(gamma2 > 0.0) || !(noise_precision > 0.0)) {
        throw std::invalid_argument("lmmse_column: precisions must be positive");
    }
    const Eigen::Index L = H.cols();
    CMat A = noise_precision * (H.adjoint() * H);
    A.diagonal().array() += gamma2;
    Eigen::LLT<CMat> llt(A);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("lmmse_column: singular system");
    }
    LmmseColumn out;
    out.C = llt.solve(CMat::Identity(L, L));
    out.d2 = llt.solve(gamma2 * r2 + noise_precision * (H.adjoint() * y));
    return out;
}

namespace {

/// Solves H (C_sum + D2 D2^H) = Y D2^H. With `ridge` set, a near-singular
/// system is regularised instead of rejected.
CMat solve_dictionary(const CMat& Y, const CMat& D2, const CMat& C_sum, bool ridge)
{
    CMat A = C_sum + D2 * D2.adjoint();
    A = 0.5 * (A + A.adjoint()).eval();
    Eigen::LDLT<CMat> ldlt(A);
    const double max_pivot = ldlt.vectorD().cwiseAbs().maxCoeff();
    const bool singular =
        ldlt.info() != Eigen::Success || !(ldlt.vectorD().cwiseAbs().minCoeff() > 1e-14 * max_pivot);
    if (singular) {
        if (!ridge || !(max_pivot > 0.0) || !std::isfinite(max_pivot)) {
            throw std::runtime_error("update_dictionary: singular regularised Gram");
        }
        A.diagonal().array() += 1e-12 * A.diagonal().real().mean();
        ldlt.compute(A);
    }
    // H A = Y D2^H  <=>  A H^H = D2 Y^H  (A Hermitian)
    return ldlt.solve(D2 * Y.adjoint()).adjoint();
}

} // namespace

CMat update_dictionary(const CMat& Y, const CMat& D2, const CMat& C_sum)
{
    if (Y.cols() != D2.cols() || C_sum.rows() != D2.rows() || C_sum.cols() != D2.rows()) {
        throw std::invalid_argument("update_dictionary: shapes do not conform");
    }
    return solve_dictionary(Y, D2, C_sum, false);
}

CMat keep_largest_per_column(const CMat& D, int K)
{
    if (K >= D.rows()) {
        return D;
    }
    CMat out = CMat::Zero(D.rows(), D.cols());
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(D.rows()));
    for (Eigen::Index t = 0; t < D.cols(); ++t) {
        for (Eigen::Index i = 0; i < D.rows(); ++i) {
            idx[static_cast<std::size_t>(i)] = i;
        }
        std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double na = std::norm(D(a, t));
            const double nb = std::norm(D(b, t));
            return na > nb || (na == nb && a < b);
        });
        for (int k = 0; k < K; ++k) {
            out(idx[static_cast<std::size_t>(k)], t) = D(idx[static_cast<std::size_t>(k)], t);
        }
    }
    return out;
}

namespace {

struct RunOutput {
    CMat H;  // working coordinates
    CMat D2; // working coordinates
    std::vector<double> history;
    bool finite = true;
};

bool all_finite(const CMat& m) { return m.allFinite(); }

/// One BAdVAMP run in working coordinates (whitened, unit-scale prior).
RunOutput run_once(const CMat& Y, int L, const std::vector<BgPrior>& priors, const BadvampConfig& cfg,
                   double noise_var, const CMat* H_start, Rng& rng)
{
    const Eigen::Index M = Y.rows();
    const Eigen::Index T = Y.cols();
    const double floor = cfg.gamma_floor;
    const double y_norm = Y.norm();
    const double y_power = Y.squaredNorm() / static_cast<double>(M * T);

    RunOutput out;
    out.H = rng.complex_normal_matrix(M, L, 1.0);
    if (H_start != nullptr) {
        out.H = *H_start;
    }
    CMat r1 = rng.complex_normal_matrix(L, T, cfg.init_r_var);
    RVec gamma1 = RVec::Constant(T, cfg.init_gamma);

    const double target_precision = 1.0 / std::max(noise_var, 1e-10 * y_power);
    double noise_precision = std::min(cfg.initial_snr / y_power, target_precision);

    CMat d1(L, T);
    CMat r2(L, T);
    CMat D2(L, T);
    RVec eta1(T);
    RVec gamma2(T);
    RVec eta2(T);
    CVec col;

    for (int it = 0; it < cfg.max_iters; ++it) {
        // denoising stage
        const int passes = cfg.adapt_gamma1 ? cfg.inner_em_iters + 1 : 1;
        for (Eigen::Index t = 0; t < T; ++t) {
            const BgPrior& prior = priors.size() == 1 ? priors[0] : priors[static_cast<std::size_t>(t)];
            const CVec r1t = r1.col(t);
            for (int pass = 0; pass < passes; ++pass) {
                const double div = denoise_column(r1t, gamma1(t), prior, col);
                eta1(t) = gamma1(t) / std::max(div, 1e-300);
                if (cfg.adapt_gamma1) {
                    const double inv = (col - r1t).squaredNorm() / static_cast<double>(L) + 1.0 / eta1(t);
                    gamma1(t) = std::max(1.0 / inv, floor);
                }
            }
            d1.col(t) = col;
            gamma2(t) = std::max(eta1(t) - gamma1(t), floor);
            r2.col(t) = (eta1(t) * d1.col(t) - gamma1(t) * r1t) / gamma2(t);
        }

        // LMMSE and dictionary stage
        for (int pass = 0; pass <= cfg.inner_lmmse_iters; ++pass) {
            Eigen::SelfAdjointEigenSolver<CMat> eig(out.H.adjoint() * out.H);
            const RVec lambda = eig.eigenvalues().cwiseMax(0.0);
            const CMat& Q = eig.eigenvectors();
            const CMat rhs = r2 * gamma2.cast<cdouble>().asDiagonal() + noise_precision * (out.H.adjoint() * Y);
            CMat proj = Q.adjoint() * rhs;
            RVec c_diag = RVec::Zero(L);
            for (Eigen::Index t = 0; t < T; ++t) {
                double trace = 0.0;
                for (Eigen::Index k = 0; k < L; ++k) {
                    const double inv = 1.0 / (gamma2(t) + noise_precision * lambda(k));
                    proj(k, t) *= inv;
                    trace += inv;
                    c_diag(k) += inv;
                }
                eta2(t) = static_cast<double>(L) / trace;
            }
            D2.noalias() = Q * proj;
            const CMat C_sum = Q * c_diag.cast<cdouble>().asDiagonal() * Q.adjoint();
            out.H = solve_dictionary(Y, D2, C_sum, true);
        }

        out.history.push_back((Y - out.H * D2).norm() / y_norm);
        if (!std::isfinite(out.history.back()) || !all_finite(D2)) {
            out.finite = false;
            break;
        }
        if (it >= cfg.anneal_hold) {
            noise_precision = std::min(noise_precision * cfg.anneal_growth, target_precision);
        }

        // extrinsic message back to the denoiser
        for (Eigen::Index t = 0; t < T; ++t) {
            const double g1_new = std::max(eta2(t) - gamma2(t), floor);
            const CVec r1_new = (eta2(t) * D2.col(t) - gamma2(t) * r2.col(t)) / g1_new;
            if (it == 0 || cfg.damping >= 1.0) {
                r1.col(t) = r1_new;
                gamma1(t) = g1_new;
            } else {
                r1.col(t) = cfg.damping * r1_new + (1.0 - cfg.damping) * r1.col(t);
                gamma1(t) = 1.0 / (cfg.damping / g1_new + (1.0 - cfg.damping) / gamma1(t));
            }
        }
    }
    out.D2 = std::move(D2);
    return out;
}

} // namespace

BadvampResult badvamp(const CMat& Y, int L, std::span<const BgPrior> priors_in, const BadvampConfig& config,
                      Rng& rng, const CMat* initial_H)
{
    config.validate();
    const Eigen::Index M = Y.rows();
    const Eigen::Index T = Y.cols();
    if (L < 1 || M < 1 || T < 1) {
        throw std::invalid_argument("badvamp: empty problem");
    }
    if (!Y.allFinite()) {
        throw std::invalid_argument("badvamp: non-finite observation");
    }
    if (priors_in.size() != 1 && priors_in.size() != static_cast<std::size_t>(T)) {
        throw std::invalid_argument("badvamp: need one prior or one prior per column");
    }
    for (const BgPrior& p : priors_in) {
        p.validate();
    }
    if (initial_H != nullptr && (initial_H->rows() != M || initial_H->cols() != L || !initial_H->allFinite())) {
        throw std::invalid_argument("badvamp: initial dictionary must be a finite M x L matrix");
    }

    BadvampResult result;
    const double y_norm = Y.norm();
    if (y_norm == 0.0) {
        result.H_hat = rng.complex_normal_matrix(M, L, 1.0);
        result.D_hat = CMat::Zero(L, T);
        result.restarts_used = 1;
        result.run_scores.push_back(0.0);
        return result;
    }

    // Unit-scale prior: D = scale * D_w.
    double second_moment = 0.0;
    double mean_sparsity = 0.0;
    for (const BgPrior& p : priors_in) {
        second_moment += p.variance;
        mean_sparsity += p.sparsity;
    }
    second_moment /= static_cast<double>(priors_in.size());
    mean_sparsity /= static_cast<double>(priors_in.size());
    const double scale = std::sqrt(second_moment);
    std::vector<BgPrior> priors(priors_in.begin(), priors_in.end());
    for (BgPrior& p : priors) {
        p.mean /= scale;
        p.variance /= scale * scale;
    }
    const int K = std::clamp(static_cast<int>(std::ceil(mean_sparsity * L - 1e-9)), 1, L);

    // Working coordinates: Y_w = W Y with W whitening the dominant subspace.
    CMat unwhiten; // maps working-coordinate H back to the observation space
    CMat whiten;
    CMat Y_work;
    double noise_work = config.noise_var;
    if (config.whiten) {
        Eigen::BDCSVD<CMat> svd(Y, Eigen::ComputeThinU);
        const RVec& s = svd.singularValues();
        Eigen::Index r = std::min<Eigen::Index>({M, static_cast<Eigen::Index>(L), s.size()});
        // Drop directions at or below the noise edge sqrt(nv) (sqrt(M) + sqrt(T)).
        const double edge = config.subspace_margin * std::sqrt(config.noise_var) *
                            (std::sqrt(static_cast<double>(M)) + std::sqrt(static_cast<double>(T)));
        while (r > 1 && !(s(r - 1) > std::max(1e-12 * s(0), edge))) {
            --r;
        }
        const double root_t = std::sqrt(static_cast<double>(T));
        const CMat U = svd.matrixU().leftCols(r);
        const RVec sr = s.head(r);
        Y_work = (U.adjoint() * Y).array().colwise() * (root_t / sr.array()).cast<cdouble>();
        unwhiten = U * (sr / root_t).cast<cdouble>().asDiagonal();
        whiten = (root_t / sr.array()).cast<cdouble>().matrix().asDiagonal() * U.adjoint();
        noise_work = config.noise_var * static_cast<double>(T) * sr.array().square().inverse().mean();
    } else {
        Y_work = Y;
        unwhiten = CMat::Identity(M, M);
        whiten = unwhiten;
    }

    const double noise_share = std::sqrt(config.noise_var * static_cast<double>(M * T)) / y_norm;
    double best_score = std::numeric_limits<double>::infinity();
    bool have_best = false;

    for (int run = 0; run < config.restarts; ++run) {
        CMat H_start;
        if (initial_H != nullptr && run == 0) {
            H_start = whiten * (*initial_H) * scale;
        }
        RunOutput out =
            run_once(Y_work, L, priors, config, noise_work, H_start.size() > 0 ? &H_start : nullptr, rng);
        result.restarts_used = run + 1;
        if (!out.finite) {
            result.run_scores.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        CMat H_hat = unwhiten * out.H / scale;
        CMat D_hat = out.D2 * scale;
        const double sparse_res = (Y - H_hat * keep_largest_per_column(D_hat, K)).norm() / y_norm;
        result.run_scores.push_back(sparse_res);
        if (!have_best || sparse_res < best_score) {
            have_best = true;
            best_score = sparse_res;
            result.final_residual = (Y - H_hat * D_hat).norm() / y_norm;
            result.sparse_residual = sparse_res;
            result.H_hat = std::move(H_hat);
            result.D_hat = std::move(D_hat);
            result.residual_history = std::move(out.history);
        }
        if (sparse_res <= config.restart_residual + noise_share) {
            break;
        }
    }
    if (!have_best) {
        result.diverged = true;
        result.H_hat = CMat::Zero(M, L);
        result.D_hat = CMat::Zero(L, T);
    }
    return result;
}

} // namespace ris
