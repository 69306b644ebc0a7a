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

#include "ris/channel_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ris {

void UpaGeometry::validate() const
{
    if (width_elems < 1 || height_elems < 1) {
        throw std::invalid_argument("UPA must have at least one element");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("UPA spacing must be positive");
    }
}

UpaGeometry UpaGeometry::square_ish(int n, double spacing)
{
    if (n < 1) {
        throw std::invalid_argument("array size must be positive");
    }
    int h = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (n % h != 0) {
        --h;
    }
    return {n / h, h, spacing};
}

ClusterCenter ClusterCenter::draw(Rng& rng)
{
    ClusterCenter c;
    c.az_arr = rng.uniform(0.0, 2.0 * kPi);
    c.el_arr = rng.uniform(0.0, kPi);
    c.az_dep = rng.uniform(0.0, 2.0 * kPi);
    c.el_dep = rng.uniform(0.0, kPi);
    return c;
}

CVec array_response(const UpaGeometry& geom, double azimuth, double elevation)
{
    geom.validate();
    if (!std::isfinite(azimuth) || !std::isfinite(elevation)) {
        throw std::invalid_argument("array_response: non-finite angle");
    }
    const int n_total = geom.size();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_total));
    const double ky = std::sin(azimuth) * std::sin(elevation);
    const double kz = std::cos(elevation);
    CVec a(n_total);
    // element (m, n) sits at index m * height + n
    for (int m = 0; m < geom.width_elems; ++m) {
        for (int n = 0; n < geom.height_elems; ++n) {
            const double phase = 2.0 * kPi * geom.spacing * (m * ky + n * kz);
            a(m * geom.height_elems + n) = norm * std::polar(1.0, phase);
        }
    }
    return a;
}

PathDraw draw_path(Rng& rng, const GeometricChannelSpec& spec, const ClusterCenter& center)
{
    const double spread = spec.angle_spread_deg * kPi / 180.0;
    PathDraw p;
    p.gain = rng.complex_normal(1.0);
    p.az_arr = center.az_arr + rng.laplace(spread);
    p.el_arr = center.el_arr + rng.laplace(spread);
    p.az_dep = center.az_dep + rng.laplace(spread);
    p.el_dep = center.el_dep + rng.laplace(spread);
    return p;
}

CMat gen_geometric_channel(Rng& rng, const UpaGeometry& rx, const UpaGeometry& tx, const GeometricChannelSpec& spec)
{
    rx.validate();
    tx.validate();
    if (spec.num_paths < 1) {
        throw std::invalid_argument("gen_geometric_channel: num_paths must be >= 1");
    }
    const int n_rx = rx.size();
    const int n_tx = tx.size();
    const ClusterCenter center = ClusterCenter::draw(rng);
    CMat out = CMat::Zero(n_rx, n_tx);
    for (int l = 0; l < spec.num_paths; ++l) {
        const PathDraw p = draw_path(rng, spec, center);
        const CVec ar = array_response(rx, p.az_arr, p.el_arr);
        const CVec at = array_response(tx, p.az_dep, p.el_dep);
        out.noalias() += p.gain * ar * at.adjoint();
    }
    out *= std::sqrt(static_cast<double>(n_rx) * n_tx / spec.num_paths);
    return out;
}

CMat recondition(const CMat& a, double kappa)
{
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("recondition: kappa must be >= 1");
    }
    if (a.size() == 0 || a.squaredNorm() == 0.0) {
        throw std::invalid_argument("recondition: zero matrix");
    }
    Eigen::BDCSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index k = svd.singularValues().size();
    RVec ramp(k);
    const double log_kappa = std::log(kappa);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double frac = k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
        ramp(i) = std::exp(-frac * log_kappa);
    }
    const double target = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
    ramp *= std::sqrt(target / ramp.squaredNorm());
    return svd.matrixU() * ramp.asDiagonal() * svd.matrixV().adjoint();
}

ChannelTriple gen_channel_set(Rng& rng, const ChannelDims& dims, const ChannelSetSpec& specs)
{
    if (dims.M < 1 || dims.N < 1 || dims.L < 1) {
        throw std::invalid_argument("gen_channel_set: dimensions must be >= 1");
    }
    const UpaGeometry ap = UpaGeometry::square_ish(dims.M, specs.ap_spacing);
    const UpaGeometry user = UpaGeometry::square_ish(dims.N, specs.user_spacing);
    const UpaGeometry lis = UpaGeometry::square_ish(dims.L, specs.lis_spacing);

    ChannelTriple t;
    t.Z = gen_geometric_channel(rng, user, ap, specs.Z);
    t.H = gen_geometric_channel(rng, ap, lis, specs.H);
    if (specs.H.target_condition) {
        t.H = recondition(t.H, *specs.H.target_condition);
    }
    GeometricChannelSpec g_spec = specs.G;
    if (g_spec.target_rank) {
        if (*g_spec.target_rank > std::min(dims.L, dims.N)) {
            throw std::invalid_argument("gen_channel_set: target rank of G exceeds its dimensions");
        }
        g_spec.num_paths = *g_spec.target_rank;
    }
    t.G = gen_geometric_channel(rng, lis, user, g_spec);
    if (g_spec.target_condition) {
        t.G = recondition(t.G, *g_spec.target_condition);
    }
    return t;
}

} // namespace ris
