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

#include <optional>
#include <vector>

namespace ris {

/// Phases in (0, 2pi] and 0/1 amplitudes, one per LIS element.
struct PhaseConfig {
    RVec phases;
    RVec amplitudes;
    std::vector<int> flagged; ///< elements whose objective term was zero

    static PhaseConfig uniform(int L, double phase = 2.0 * kPi);
    static PhaseConfig off(int L);
    static PhaseConfig random(int L, Rng& rng);
    CVec diagonal() const; ///< amplitude * exp(j phase)
    void validate() const;
};

struct EigenmodeLink {
    CMat W; ///< M x N_s precoder
    CMat V; ///< N x N_s combiner
    int streams = 0;
    bool rank_deficient = false; ///< some used singular values are numerically zero
};

/// G_dl diag(phi) H_dl + Z_dl with G_dl N x L, H_dl L x M, Z_dl N x M.
CMat composite_channel(const CMat& G_dl, const PhaseConfig& phi, const CMat& H_dl, const CMat& Z_dl);

/// Per-element maximiser of Re{c_l e^{j phi_l}}, c_l = sum_ij conj(z_ij) g_il h_lj.
PhaseConfig optimal_phases(const CMat& G_dl, const CMat& H_dl, const CMat& Z_dl);

/// Coordinate ascent of ||G_dl Phi H_dl + Z_dl||_F^2 over a uniform phase grid.
/// Starts from `start` when given, otherwise from all phases 2pi. Requires L <= 16.
PhaseConfig grid_search_phases(const CMat& G_dl, const CMat& H_dl, const CMat& Z_dl, int points_per_element,
                               int passes, const std::optional<PhaseConfig>& start = std::nullopt);

inline constexpr int kGridSearchMaxElements = 16;

/// Top-N_s singular vectors; the largest entry of each left vector is made
/// real-positive (the right vector gets the same rotation).
EigenmodeLink eigenmode(const CMat& channel, int streams);

/// log2 det(I + snr W^H D^H V V^H D W).
double achievable_rate(const CMat& channel, const CMat& W, const CMat& V, double snr);

} // namespace ris
