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

namespace ris {

/// Uniform planar array in the yz-plane, width x height elements.
struct UpaGeometry {
    int width_elems = 1;
    int height_elems = 1;
    double spacing = 0.5; ///< inter-element spacing in wavelengths

    int size() const { return width_elems * height_elems; }
    void validate() const;

    /// Most-square factorisation of n elements (width >= height).
    static UpaGeometry square_ish(int n, double spacing = 0.5);
};

struct GeometricChannelSpec {
    int num_paths = 1;
    double angle_spread_deg = 10.0; ///< standard deviation of the Laplacian offsets
    std::optional<double> target_condition;
    std::optional<int> target_rank;
};

struct PathDraw {
    cdouble gain;
    double az_arr = 0.0;
    double el_arr = 0.0;
    double az_dep = 0.0;
    double el_dep = 0.0;
};

/// Mean angles shared by every path of one channel realisation.
struct ClusterCenter {
    double az_arr = 0.0;
    double el_arr = 0.0;
    double az_dep = 0.0;
    double el_dep = 0.0;

    static ClusterCenter draw(Rng& rng);
};

/// Uplink channels: H is AP <- LIS (M x L), G is LIS <- user (L x N).
/// Z is stored N x M (the orientation of the downlink direct channel);
/// the uplink user -> AP operator is Z^T.
struct ChannelTriple {
    CMat H;
    CMat G;
    CMat Z;

    CMat direct_uplink() const { return Z.transpose(); }
};

struct ChannelDims {
    int M = 1; ///< AP antennas
    int N = 1; ///< user antennas
    int L = 1; ///< LIS elements
};

struct ChannelSetSpec {
    GeometricChannelSpec Z{64, 10.0, std::nullopt, std::nullopt};
    GeometricChannelSpec H{64, 10.0, 100.0, std::nullopt};
    GeometricChannelSpec G{8, 10.0, std::nullopt, 8};
    double ap_spacing = 0.5;
    double user_spacing = 0.5;
    double lis_spacing = 0.5;
};

CVec array_response(const UpaGeometry& geom, double azimuth, double elevation);

/// One propagation path with unit-variance gain; angles are the
/// cluster means plus Laplacian offsets.
PathDraw draw_path(Rng& rng, const GeometricChannelSpec& spec, const ClusterCenter& center);

CMat gen_geometric_channel(Rng& rng, const UpaGeometry& rx, const UpaGeometry& tx, const GeometricChannelSpec& spec);

/// Replace the singular values of a by a log-spaced ramp with condition
/// number kappa, scaled so ||result||_F^2 = rows * cols.
CMat recondition(const CMat& a, double kappa);

ChannelTriple gen_channel_set(Rng& rng, const ChannelDims& dims, const ChannelSetSpec& specs);

} // namespace ris
