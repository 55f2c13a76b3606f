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

#include "fcarray/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fca {

void ArrayLayout::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw Error(Errc::config, "layout." + field + ": " + why);
    };
    if (M < 1) fail("M", "must be >= 1");
    if (N < 0) fail("N", "must be >= 0");
    if (!(d_y > 0.0)) fail("d_y", "must be > 0");
    if (!(A > 0.0)) fail("A", "must be > 0");
    if (!(d_min > 0.0) || !(d_min < A)) fail("d_min", "must satisfy 0 < d_min < A");
    if (!(f_c > 0.0)) fail("f_c", "must be > 0");
}

CouplerPlacement::CouplerPlacement(int antennas, int couplers)
    : couplers_(couplers), p_(static_cast<size_t>(antennas), Vec::Zero(2 * couplers)) {}

bool CouplerPlacement::operator==(const CouplerPlacement& other) const {
    if (couplers_ != other.couplers_ || p_.size() != other.p_.size()) return false;
    for (size_t m = 0; m < p_.size(); ++m)
        if (p_[m] != other.p_[m]) return false;
    return true;
}

namespace {

// Region and spacing margins of a single antenna's couplers.
void check_antenna(const Vec& p_m, int m, const ArrayLayout& layout, double tol,
                   FeasibilityReport& report) {
    const int N = layout.N;
    const Vec2 q = layout.active_position(m);
    const double half = layout.half_side();
    const double dmin = layout.min_spacing();

    auto element = [&](int n) -> Vec2 { return n == 0 ? q : Vec2(p_m.segment<2>(2 * (n - 1))); };

    for (int n = 1; n <= N; ++n) {
        const Vec2 d = element(n) - q;
        const double margin = half - d.cwiseAbs().maxCoeff();
        if (margin < -tol) {
            report.feasible = false;
            report.violations.push_back({Violation::Kind::region, m, n, -1, margin});
        }
    }
    for (int n = 0; n <= N; ++n) {
        for (int n2 = n + 1; n2 <= N; ++n2) {
            const double margin = (element(n) - element(n2)).norm() - dmin;
            if (margin < -tol) {
                report.feasible = false;
                report.violations.push_back({Violation::Kind::spacing, m, n, n2, margin});
            }
        }
    }
}

}  // namespace

FeasibilityReport is_feasible_local(const Vec& p_m, int m, const ArrayLayout& layout,
                                    double tolerance_wl) {
    if (p_m.size() != 2 * layout.N || m < 0 || m >= layout.M)
        throw Error(Errc::dimension_mismatch, "local position vector does not match layout");
    FeasibilityReport report;
    check_antenna(p_m, m, layout, tolerance_wl * layout.lambda(), report);
    return report;
}

FeasibilityReport is_feasible(const CouplerPlacement& placement, const ArrayLayout& layout,
                              double tolerance_wl) {
    if (placement.antennas() != layout.M || placement.couplers() != layout.N)
        throw Error(Errc::dimension_mismatch, "placement is " +
                                                  std::to_string(placement.antennas()) + "x" +
                                                  std::to_string(placement.couplers()) +
                                                  ", layout expects " + std::to_string(layout.M) +
                                                  "x" + std::to_string(layout.N));
    FeasibilityReport report;
    const double tol = tolerance_wl * layout.lambda();
    for (int m = 0; m < layout.M; ++m) check_antenna(placement.antenna(m), m, layout, tol, report);
    return report;
}

CouplerPlacement uniform_placement(const ArrayLayout& layout) {
    const int N = layout.N;
    CouplerPlacement placement(layout.M, N);
    if (N == 0) return placement;

    const double lambda = layout.lambda();
    const double dmin = layout.min_spacing();

    // Smallest s x s grid centered on the active element. Odd grids put a
    // node on q_m, which is skipped.
    int s = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N))));
    if (s % 2 == 1 && s * s - 1 < N) ++s;

    // Even grids have their nearest nodes at pitch/sqrt(2) from q_m. The
    // floor carries a relative margin so nodes landing exactly on d_min do
    // not round below it.
    const double spacing_floor = ((s % 2 == 0) ? std::sqrt(2.0) * dmin : dmin) * (1.0 + 1e-9);
    const double pitch = std::max(spacing_floor, layout.A * lambda / (s + 1));
    const double extent = 0.5 * (s - 1) * pitch;
    if (extent > layout.half_side() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << N << " couplers need a " << s << "x" << s << " grid of pitch " << pitch / lambda
           << " wavelengths, which exceeds the region of side " << layout.A;
        throw Error(Errc::infeasible_layout, os.str());
    }

    struct Node {
        Vec2 offset;
        double radius;
        double axis_angle;
        double angle;
    };
    std::vector<Node> nodes;
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            const Vec2 off((i - 0.5 * (s - 1)) * pitch, (j - 0.5 * (s - 1)) * pitch);
            const double r = off.norm();
            if (r < 1e-12 * lambda) continue;
            double angle = std::atan2(off.y(), off.x());
            double axis = angle < 0.0 ? angle + kPi : angle;
            if (axis >= kPi - 1e-12) axis = 0.0;
            nodes.push_back({off, r, axis, angle});
        }
    }
    // Nearest rings first; antipodal nodes are adjacent so even counts stay
    // point-symmetric about q_m.
    std::stable_sort(nodes.begin(), nodes.end(), [&](const Node& a, const Node& b) {
        const double eps = 1e-9 * lambda;
        if (std::abs(a.radius - b.radius) > eps) return a.radius < b.radius;
        if (std::abs(a.axis_angle - b.axis_angle) > 1e-9) return a.axis_angle < b.axis_angle;
        return a.angle > b.angle;
    });

    for (int m = 0; m < layout.M; ++m) {
        const Vec2 q = layout.active_position(m);
        for (int n = 0; n < N; ++n) placement.set_point(m, n, q + nodes[n].offset);
    }
    if (!is_feasible(placement, layout, 0.0))
        throw Error(Errc::infeasible_layout, "uniform grid violates the spacing constraint");
    return placement;
}

CouplerPlacement random_feasible_placement(const ArrayLayout& layout, std::mt19937_64& rng) {
    CouplerPlacement placement(layout.M, layout.N);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double half = layout.half_side();
    const double dmin = layout.min_spacing();
    constexpr int kMaxRestarts = 10000;

    for (int m = 0; m < layout.M; ++m) {
        const Vec2 q = layout.active_position(m);
        int restarts = 0;
        for (int n = 0; n < layout.N;) {
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                const Vec2 cand = q + half * Vec2(unit(rng), unit(rng));
                bool ok = (cand - q).norm() >= dmin;
                for (int k = 0; k < n && ok; ++k) ok = (cand - placement.point(m, k)).norm() >= dmin;
                if (ok) {
                    placement.set_point(m, n, cand);
                    placed = true;
                }
            }
            if (placed) {
                ++n;
            } else {
                if (++restarts > kMaxRestarts)
                    throw Error(Errc::infeasible_layout, "rejection sampling found no feasible placement");
                n = 0;
            }
        }
    }
    return placement;
}

double LinearizedFeasibleSet::max_violation(const Vec& x) const {
    if (x.size() == 0) return 0.0;
    double worst = std::max((lower - x).maxCoeff(), (x - upper).maxCoeff());
    for (const auto& h : halfspaces)
        worst = std::max(worst, (h.normal.dot(x) - h.offset) / h.normal.norm());
    return worst;
}

LinearizedFeasibleSet linearize_spacing(const CouplerPlacement& anchor, int m,
                                        const ArrayLayout& layout) {
    if (anchor.antennas() != layout.M || anchor.couplers() != layout.N || m < 0 || m >= layout.M)
        throw Error(Errc::dimension_mismatch, "anchor does not match layout");
    return linearize_spacing(anchor.antenna(m), m, layout);
}

LinearizedFeasibleSet linearize_spacing(const Vec& p0, int m, const ArrayLayout& layout) {
    if (p0.size() != 2 * layout.N || m < 0 || m >= layout.M)
        throw Error(Errc::dimension_mismatch, "anchor does not match layout");
    if (!is_feasible_local(p0, m, layout))
        throw Error(Errc::anchor_infeasible, "anchor of antenna " + std::to_string(m) + " is infeasible");

    const int N = layout.N;
    const Vec2 q = layout.active_position(m);
    const double dmin2 = layout.min_spacing() * layout.min_spacing();

    LinearizedFeasibleSet set;
    set.anchor = p0;
    set.length_scale = layout.lambda();
    set.lower.resize(2 * N);
    set.upper.resize(2 * N);
    for (int n = 0; n < N; ++n) {
        set.lower.segment<2>(2 * n) = q.array() - layout.half_side();
        set.upper.segment<2>(2 * n) = q.array() + layout.half_side();
    }

    // d(p) = |p_n - p_n'|^2 is convex, so d(p0) + grad^T (p - p0) >= dmin^2
    // implies the true spacing constraint.
    for (int n = 0; n <= N; ++n) {
        for (int n2 = n + 1; n2 <= N; ++n2) {
            const Vec2 pa = n == 0 ? q : Vec2(p0.segment<2>(2 * (n - 1)));
            const Vec2 pb = p0.segment<2>(2 * (n2 - 1));
            const Vec2 diff = pa - pb;
            Vec grad = Vec::Zero(2 * N);
            if (n > 0) grad.segment<2>(2 * (n - 1)) = 2.0 * diff;
            grad.segment<2>(2 * (n2 - 1)) = -2.0 * diff;
            const double d0 = diff.squaredNorm();
            set.halfspaces.push_back({-grad, d0 - grad.dot(p0) - dmin2, n, n2});
        }
    }
    return set;
}

Projection project_onto_set(const Vec& x, const LinearizedFeasibleSet& set, double tol_wl,
                            int max_sweeps) {
    const Eigen::Index dim = set.anchor.size();
    if (x.size() != dim) throw Error(Errc::dimension_mismatch, "point and set differ in dimension");
    const double tol = tol_wl * set.length_scale;
    const size_t P = set.halfspaces.size();
    if (dim == 0) return {x, 0};

    Vec cur = x;
    Vec inc_box = Vec::Zero(dim);
    std::vector<Vec> inc(P, Vec::Zero(dim));

    Projection out;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        const Vec start = cur;

        Vec z = cur + inc_box;
        cur = z.cwiseMax(set.lower).cwiseMin(set.upper);
        inc_box = z - cur;

        for (size_t i = 0; i < P; ++i) {
            const auto& h = set.halfspaces[i];
            z = cur + inc[i];
            const double excess = h.normal.dot(z) - h.offset;
            if (excess > 0.0)
                cur = z - (excess / h.normal.squaredNorm()) * h.normal;
            else
                cur = z;
            inc[i] = z - cur;
        }

        if ((cur - start).norm() <= tol) {
            out.sweeps = sweep;
            // Dykstra ends on the last set; pull any leftover violation back
            // toward the anchor, which is a member of the convex set.
            if (set.max_violation(cur) > 1e-12 * set.length_scale) {
                const Vec step = cur - set.anchor;
                double theta = 1.0;
                auto limit = [&theta](double rise, double slack) {
                    if (rise > slack) theta = std::min(theta, std::max(0.0, slack / rise));
                };
                for (const auto& h : set.halfspaces)
                    limit(h.normal.dot(step), h.offset - h.normal.dot(set.anchor));
                for (Eigen::Index i = 0; i < dim; ++i) {
                    limit(step(i), set.upper(i) - set.anchor(i));
                    limit(-step(i), set.anchor(i) - set.lower(i));
                }
                cur = set.anchor + theta * step;
            }
            out.point = cur;
            return out;
        }
    }
    throw Error(Errc::no_convergence,
                "Dykstra projection did not converge in " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace fca
