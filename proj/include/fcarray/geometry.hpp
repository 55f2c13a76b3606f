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

#include <random>
#include <vector>

#include "fcarray/common.hpp"

namespace fca {

/// Array geometry. Spacings are in wavelengths, as they appear in configs;
/// the accessors return meters.
struct ArrayLayout {
    int M = 4;             ///< FC antennas (one active dipole each)
    int N = 2;             ///< movable couplers per antenna
    double d_y = 2.2;      ///< active-antenna spacing along y
    double A = 2.0;        ///< side of the square movement region
    double d_min = 0.15;   ///< minimum element spacing
    double f_c = 7.0e9;    ///< carrier frequency (Hz)

    double lambda() const { return kSpeedOfLight / f_c; }
    double min_spacing() const { return d_min * lambda(); }
    double half_side() const { return 0.5 * A * lambda(); }

    /// Position of the m-th active antenna (0-based), q_m = [0, m d_y].
    Vec2 active_position(int m) const { return {0.0, m * d_y * lambda()}; }

    /// Throws Errc::config when a field is out of range.
    void validate() const;
};

/// Coupler positions of every FC antenna. Antenna m owns a 2N vector laid
/// out as [x_1, y_1, ..., x_N, y_N] in meters.
class CouplerPlacement {
public:
    CouplerPlacement() = default;
    CouplerPlacement(int antennas, int couplers);

    int antennas() const { return static_cast<int>(p_.size()); }
    int couplers() const { return couplers_; }

    const Vec& antenna(int m) const { return p_[m]; }
    Vec& antenna(int m) { return p_[m]; }

    /// n is 0-based over the couplers (the active element is not stored).
    Vec2 point(int m, int n) const { return p_[m].segment<2>(2 * n); }
    void set_point(int m, int n, const Vec2& xy) { p_[m].segment<2>(2 * n) = xy; }

    bool operator==(const CouplerPlacement& other) const;

private:
    int couplers_ = 0;
    std::vector<Vec> p_;
};

struct Violation {
    enum class Kind { region, spacing };
    Kind kind;
    int m;
    int n;        ///< element index, 0 = active, 1..N couplers
    int n_other;  ///< second element for spacing violations, -1 otherwise
    double margin;  ///< signed slack in meters, negative when violated
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;
    explicit operator bool() const { return feasible; }
};

/// Absolute slack accepted by is_feasible, in wavelengths.
inline constexpr double kFeasibilityTolerance = 1e-8;

FeasibilityReport is_feasible(const CouplerPlacement& placement, const ArrayLayout& layout,
                              double tolerance_wl = kFeasibilityTolerance);

/// Same check restricted to antenna m with a local position vector.
FeasibilityReport is_feasible_local(const Vec& p_m, int m, const ArrayLayout& layout,
                                    double tolerance_wl = kFeasibilityTolerance);

/// Deterministic grid placement used as the fixed-coupler baseline and as the
/// optimizer's starting point. Throws Errc::infeasible_layout when the grid does
/// not fit.
CouplerPlacement uniform_placement(const ArrayLayout& layout);

/// Independent uniform draws per coupler inside C_m, rejected until the
/// spacing constraints hold.
CouplerPlacement random_feasible_placement(const ArrayLayout& layout, std::mt19937_64& rng);

struct HalfSpace {
    Vec normal;     ///< a in a^T x <= b
    double offset;  ///< b
    int n;
    int n_other;
};

/// Convex inner approximation of the local feasible set around an anchor:
/// the box C_m plus one affine constraint per element pair.
struct LinearizedFeasibleSet {
    Vec anchor;
    Vec lower;
    Vec upper;
    std::vector<HalfSpace> halfspaces;
    double length_scale = 1.0;  ///< wavelength, sets projection tolerances

    /// Largest constraint violation in meters; half-spaces count their signed
    /// distance (a^T x - b) / |a|.
    double max_violation(const Vec& x) const;
    bool contains(const Vec& x, double tol = 0.0) const { return max_violation(x) <= tol; }
};

LinearizedFeasibleSet linearize_spacing(const CouplerPlacement& anchor, int m,
                                        const ArrayLayout& layout);

/// Same set built from antenna m's local position vector alone.
LinearizedFeasibleSet linearize_spacing(const Vec& p_m, int m, const ArrayLayout& layout);

struct Projection {
    Vec point;
    int sweeps = 0;
};

/// Euclidean projection by Dykstra's alternating projections over the box and
/// each half-space. Converged when one sweep moves the iterate less than
/// tol_wl wavelengths.
Projection project_onto_set(const Vec& x, const LinearizedFeasibleSet& set,
                            double tol_wl = 1e-9, int max_sweeps = 2000);

}  // namespace fca
