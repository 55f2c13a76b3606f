// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The fcarray Authors
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

#include "fcarray/channel.hpp"

#include <cmath>
#include <random>

namespace fca {

void MultipathSpec::validate() const {
    for (int k = 0; k < K(); ++k) {
        const auto& u = users[k];
        const std::string where = "channels.users[" + std::to_string(k) + "]";
        if (u.paths() < 1) throw Error(Errc::config, where + ": needs at least one path");
        if (u.gains.size() != u.angles.size())
            throw Error(Errc::config, where + ": angles and gains differ in length");
        if ((u.angles.array().abs() > 0.5 * kPi + 1e-12).any())
            throw Error(Errc::config, where + ": angles must lie in [-pi/2, pi/2]");
        if (!(u.noise_variance > 0.0)) throw Error(Errc::config, where + ": noise variance must be > 0");
    }
}

cplx steering_active_entry(double phi, int m, const ArrayLayout& layout) {
    return std::exp(-kJ * (2.0 * kPi * m * layout.d_y * std::sin(phi)));
}

CVec steering_active(double phi, const ArrayLayout& layout) {
    CVec a(layout.M);
    for (int m = 0; m < layout.M; ++m) a(m) = steering_active_entry(phi, m, layout);
    return a;
}

CVec steering_coupler_local(double phi, const Vec& p_m, double lambda) {
    const auto N = p_m.size() / 2;
    const double kx = 2.0 * kPi / lambda * std::cos(phi);
    const double ky = 2.0 * kPi / lambda * std::sin(phi);
    CVec a(N);
    for (Eigen::Index n = 0; n < N; ++n) a(n) = std::exp(-kJ * (kx * p_m(2 * n) + ky * p_m(2 * n + 1)));
    return a;
}

CVec steering_coupler(double phi, const CouplerPlacement& placement, double lambda) {
    const int M = placement.antennas();
    const int N = placement.couplers();
    CVec a(M * N);
    for (int m = 0; m < M; ++m) a.segment(m * N, N) = steering_coupler_local(phi, placement.antenna(m), lambda);
    return a;
}

ChannelRealization user_channel(const MultipathSpec& spec, int k,
                                const CouplerPlacement& placement, const ArrayLayout& layout) {
    const auto& u = spec.users.at(k);
    ChannelRealization out;
    out.M = layout.M;
    out.N = layout.N;
    out.h = CVec::Zero(layout.M * (layout.N + 1));
    for (int l = 0; l < u.paths(); ++l) {
        out.h.head(layout.M) += u.gains(l) * steering_active(u.angles(l), layout);
        out.h.tail(layout.M * layout.N) +=
            u.gains(l) * steering_coupler(u.angles(l), placement, layout.lambda());
    }
    return out;
}

MultipathSpec sample_channels(std::uint64_t seed, int K, int L, double g0, double noise_variance) {
    if (K < 1 || L < 1) throw Error(Errc::config, "sample_channels needs K >= 1 and L >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-0.5 * kPi, 0.5 * kPi);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * g0 / L));
    MultipathSpec spec;
    spec.users.resize(K);
    for (auto& u : spec.users) {
        u.angles.resize(L);
        u.gains.resize(L);
        u.noise_variance = noise_variance;
        for (int l = 0; l < L; ++l) {
            u.angles(l) = angle(rng);
            const double re = normal(rng);
            u.gains(l) = {re, normal(rng)};
        }
    }
    return spec;
}

}  // namespace fca
