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

#include <iosfwd>
#include <vector>

#include "fcarray/common.hpp"
#include "fcarray/geometry.hpp"

namespace fca {

/// Thin straight-wire dipole shared by the active element and its couplers.
/// All dipoles stand normal to the placement plane, so every pair is in the
/// side-by-side configuration.
struct DipoleModel {
    double wavelength = kSpeedOfLight / 7.0e9;
    double length = 0.5 * kSpeedOfLight / 7.0e9;
    cplx self_impedance{73.13, 42.54};
    cplx load_impedance{0.05, 50.0};
    double min_separation = 0.15 * kSpeedOfLight / 7.0e9;  ///< TooClose guard
};

/// Half-wave dipoles on the layout's carrier, guarded at d_min.
DipoleModel half_wave_dipole(const ArrayLayout& layout);

/// Induced-EMF mutual impedance of two equal parallel dipoles at distance d,
///   R21 =  eta/4pi [2 Ci(u0) - Ci(u1) - Ci(u2)]
///   X21 = -eta/4pi [2 Si(u0) - Si(u1) - Si(u2)]
/// with u0 = kd and u1,2 = k(sqrt(d^2 + l^2) +- l).
cplx mutual_impedance(double d, const DipoleModel& model);

/// Per-antenna impedance structure. z_bar couples the active element with
/// each coupler, Z_hat couples the couplers among themselves and X holds
/// the coupler loads.
struct ImpedanceBlock {
    cplx z_self;
    CVec z_bar;
    CMat Z_hat;
    CMat X;

    int couplers() const { return static_cast<int>(z_bar.size()); }
    /// (N+1)x(N+1) matrix [z_self, z_bar^T; z_bar, Z_hat].
    CMat full() const;
};

/// p_m is the 2N local position vector, q_m the active element.
ImpedanceBlock build_block(const Vec& p_m, const Vec2& q_m, const DipoleModel& model);

std::vector<ImpedanceBlock> build_blocks(const CouplerPlacement& placement,
                                         const ArrayLayout& layout, const DipoleModel& model);

/// CSV rows "d_m,d_wl,re,im" for validation plots.
void write_impedance_table(std::ostream& os, const DipoleModel& model,
                           const std::vector<double>& distances);

}  // namespace fca
