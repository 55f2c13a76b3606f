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

#pragma once

#include <cstdint>
#include <vector>

#include "fcarray/common.hpp"
#include "fcarray/geometry.hpp"

namespace fca {

/// Far-field paths of one user: azimuth angles of departure in [-pi/2, pi/2]
/// and complex path gains.
struct UserPaths {
    Vec angles;
    CVec gains;
    double noise_variance = 1.0;

    int paths() const { return static_cast<int>(angles.size()); }
};

struct MultipathSpec {
    std::vector<UserPaths> users;

    int K() const { return static_cast<int>(users.size()); }
    void validate() const;
};

/// a_y(phi): entry m is exp(-j 2pi/lambda m d_y sin(phi)), entry 0 is 1.
CVec steering_active(double phi, const ArrayLayout& layout);

/// Entry m of a_y(phi) alone; bit-identical to steering_active(phi, layout)(m).
cplx steering_active_entry(double phi, int m, const ArrayLayout& layout);

/// a_C(phi, p): antenna-major, coupler-minor; each entry exp(-j 2pi/lambda kappa^T p_nm)
/// with kappa = [cos phi, sin phi].
CVec steering_coupler(double phi, const CouplerPlacement& placement, double lambda);

/// Coupler steering of a single antenna (length N).
CVec steering_coupler_local(double phi, const Vec& p_m, double lambda);

/// h_k(p) ordered [active block (M); coupler block (MN)].
struct ChannelRealization {
    CVec h;
    int M = 0;
    int N = 0;

    auto active() const { return h.head(M); }
    auto coupler(int m) const { return h.segment(M + m * N, N); }
};

ChannelRealization user_channel(const MultipathSpec& spec, int k,
                                const CouplerPlacement& placement, const ArrayLayout& layout);

/// Angles i.i.d. uniform on [-pi/2, pi/2], gains i.i.d. CN(0, g0/L).
MultipathSpec sample_channels(std::uint64_t seed, int K, int L, double g0 = 1.0,
                              double noise_variance = 1.0);

}  // namespace fca
