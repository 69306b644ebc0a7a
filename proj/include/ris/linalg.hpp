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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace ris {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Seeded random source. All stochastic routines take one of these
/// explicitly so that a seed fully determines every draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cdouble complex_normal(double variance = 1.0)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    /// Zero-mean Laplacian with the given standard deviation.
    double laplace(double stddev)
    {
        if (stddev <= 0.0) {
            return 0.0;
        }
        const double scale = stddev / std::sqrt(2.0);
        double u = 0.0;
        do {
            u = std::uniform_real_distribution<double>(-0.5, 0.5)(engine_);
        } while (std::abs(u) >= 0.5);
        const double sign = u < 0.0 ? -1.0 : 1.0;
        return -scale * sign * std::log1p(-2.0 * std::abs(u));
    }

    CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0)
    {
        CMat out(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                out(r, c) = complex_normal(variance);
            }
        }
        return out;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Numerical rank: number of singular values above tol * sigma_max.
inline Eigen::Index numerical_rank(const CMat& a, double rel_tol = 1e-10)
{
    if (a.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<CMat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * s(0)) {
            ++r;
        }
    }
    return r;
}

inline double condition_number(const CMat& a)
{
    Eigen::JacobiSVD<CMat> svd(a);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

/// 10 log10 of ||truth - estimate||_F^2 / ||truth||_F^2.
inline double nmse_db(const CMat& truth, const CMat& estimate)
{
    const double num = (truth - estimate).squaredNorm();
    const double den = truth.squaredNorm();
    return 10.0 * std::log10(std::max(num / den, 1e-30));
}

} // namespace ris
