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

#pragma once

#include "ris/linalg.hpp"

#include <span>
#include <vector>

namespace ris {

/// Bernoulli-Gaussian prior (1 - rho) delta_0 + rho CN(mean, variance).
struct BgPrior {
    double sparsity = 1.0;
    cdouble mean{0.0, 0.0};
    double variance = 1.0;

    void validate() const;
};

struct BadvampConfig {
    int max_iters = 300;        ///< outer iterations per run
    int inner_em_iters = 1;     ///< denoiser loop runs inner_em_iters + 1 passes when adapt_gamma1 is set
    int inner_lmmse_iters = 0;  ///< LMMSE/dictionary loop runs inner_lmmse_iters + 1 passes
    int restarts = 10;          ///< maximum number of runs (first run included)
    double init_r_var = 10.0;
    double init_gamma = 1e-3;
    double gamma_floor = 1e-8;
    double damping = 0.9;       ///< weight of the new r1/gamma1 in the convex update
    bool adapt_gamma1 = false;  ///< re-estimate gamma1 from the denoiser residual inside the EM loop

    /// Known noise variance of Y (thermal plus direct-channel residual).
    double noise_var = 0.0;
    /// Noise precision starts at initial_snr / mean|Y|^2, is held for
    /// anneal_hold iterations, then grows geometrically up to 1/noise_var.
    double initial_snr = 4.0;
    int anneal_hold = 100;
    double anneal_growth = 1.1;
    /// Work in the whitened dominant subspace of Y.
    bool whiten = true;
    /// When whitening, keep only singular directions of Y above
    /// subspace_margin times the noise edge; 0 keeps min(M, L) directions.
    double subspace_margin = 0.0;
    /// A run whose K-sparse residual exceeds this (relative, after
    /// subtracting the expected noise share) triggers a restart.
    double restart_residual = 0.1;

    void validate() const;
};

struct BadvampResult {
    CMat H_hat;                          ///< M x L
    CMat D_hat;                          ///< L x T_r
    std::vector<double> residual_history; ///< per-iteration ||Y - H D2||_F / ||Y||_F of the selected run
    int restarts_used = 0;               ///< number of runs executed
    double final_residual = 0.0;         ///< ||Y - H_hat D_hat||_F / ||Y||_F
    double sparse_residual = 0.0;        ///< same, with D_hat hard-thresholded to K entries per column
    std::vector<double> run_scores;      ///< sparse_residual of every completed run
    bool diverged = false;               ///< every run produced non-finite iterates
};

struct LmmseColumn {
    CMat C;   ///< L x L posterior covariance
    CVec d2;  ///< posterior mean
};

/// Y = H (S o (G X_b)) + N, N i.i.d. CN(0, noise_var + error_var).
CMat simulate_stage2(Rng& rng, const CMat& H, const CMat& G, const RMat& S, const CMat& X_b,
                     double noise_var, double error_var);

/// Elementwise posterior mean of d given r = d + CN(0, 1/gamma).
CVec bg_denoise(const CVec& r, double gamma, const BgPrior& prior);

/// Mean over entries of d(posterior mean)/dr (Wirtinger); equals gamma times
/// the mean posterior variance.
double bg_denoise_divergence(const CVec& r, double gamma, const BgPrior& prior);

/// C = (gamma2 I + w H^H H)^{-1}, d2 = C (gamma2 r2 + w H^H y) with w the
/// noise precision of y.
LmmseColumn lmmse_column(const CMat& H, const CVec& y, const CVec& r2, double gamma2,
                         double noise_precision = 1.0);

/// H = Y D2^H (C_sum + D2 D2^H)^{-1}.
CMat update_dictionary(const CMat& Y, const CMat& D2, const CMat& C_sum);

/// Keep the K largest-magnitude entries of each column.
CMat keep_largest_per_column(const CMat& D, int K);

/// Bilinear adaptive VAMP for Y = H D + N with Bernoulli-Gaussian columns.
/// `priors` holds one entry shared by all columns or one per column.
/// `initial_H` (M x L), when given, replaces the random dictionary of the first run.
BadvampResult badvamp(const CMat& Y, int L, std::span<const BgPrior> priors, const BadvampConfig& config,
                      Rng& rng, const CMat* initial_H = nullptr);

} // namespace ris
