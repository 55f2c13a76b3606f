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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fcarray/geometry.hpp"
#include "test_helpers.hpp"

using namespace fca;

TEST_SUITE("geometry") {

TEST_CASE("layout validation and units") {
    ArrayLayout L;
    CHECK(rel_err(L.lambda(), kSpeedOfLight / 7e9) < 1e-12);
    CHECK(L.active_position(3).y() == doctest::Approx(3 * 2.2 * L.lambda()));
    ArrayLayout bad = L;
    bad.M = 0;
    CHECK_ERRC(bad.validate(), Errc::config);
    bad = L;
    bad.d_min = 3.0;  // must stay below A
    CHECK_ERRC(bad.validate(), Errc::config);
    bad = L;
    bad.N = -1;
    CHECK_ERRC(bad.validate(), Errc::config);
}

TEST_CASE("uniform placement") {
    ArrayLayout L;
    L.M = 3;
    SUBCASE("tight regions stay feasible") {
        for (int N : {1, 2, 3, 4}) {
            L.N = N;
            L.A = 0.5;
            CHECK(is_feasible(uniform_placement(L), L, 0.0).feasible);
        }
    }
    SUBCASE("single coupler is feasible") {
        L.N = 1;
        const auto p = uniform_placement(L);
        CHECK(is_feasible(p, L).feasible);
    }
    SUBCASE("two couplers sit symmetrically about the active element") {
        L.N = 2;
        const auto p = uniform_placement(L);
        CHECK(is_feasible(p, L).feasible);
        for (int m = 0; m < L.M; ++m) {
            const Vec2 q = L.active_position(m);
            CHECK((p.point(m, 0) + p.point(m, 1) - 2.0 * q).norm() < 1e-15);
            CHECK((p.point(m, 0) - p.point(m, 1)).norm() >= L.min_spacing());
        }
    }
    SUBCASE("identical across antennas up to translation") {
        for (int N : {1, 2, 3, 5, 8}) {
            L.N = N;
            const auto p = uniform_placement(L);
            CHECK(is_feasible(p, L).feasible);
            for (int m = 1; m < L.M; ++m)
                for (int n = 0; n < N; ++n)
                    CHECK((p.point(m, n) - L.active_position(m) - (p.point(0, n) - L.active_position(0))).norm() <
                          1e-12 * L.lambda());
        }
    }
    SUBCASE("too many couplers") {
        L.N = 100;
        L.A = 1.0;
        L.d_min = 0.5;
        CHECK_ERRC(uniform_placement(L), Errc::infeasible_layout);
    }
}

TEST_CASE("feasibility report") {
    ArrayLayout L;
    L.M = 2;
    L.N = 2;
    auto p = uniform_placement(L);
    CHECK(is_feasible(p, L).feasible);

    SUBCASE("coincident couplers") {
        p.set_point(1, 1, p.point(1, 0));
        const auto r = is_feasible(p, L);
        CHECK_FALSE(r.feasible);
        bool found = false;
        for (const auto& v : r.violations)
            if (v.kind == Violation::Kind::spacing && v.m == 1 && v.n == 1 && v.n_other == 2) {
                found = true;
                CHECK(v.margin == doctest::Approx(-L.min_spacing()));
            }
        CHECK(found);
    }
    SUBCASE("coupler on the active element") {
        p.set_point(0, 0, L.active_position(0));
        const auto r = is_feasible(p, L);
        CHECK_FALSE(r.feasible);
        bool found = false;
        for (const auto& v : r.violations) found |= v.kind == Violation::Kind::spacing && v.n == 0;
        CHECK(found);
    }
    SUBCASE("outside the region") {
        p.set_point(0, 0, L.active_position(0) + Vec2(2.0 * L.lambda(), 0.0));
        const auto r = is_feasible(p, L);
        CHECK_FALSE(r.feasible);
        CHECK(r.violations.front().kind == Violation::Kind::region);
    }
    SUBCASE("dimension mismatch") {
        CouplerPlacement wrong(L.M, 3);
        CHECK_ERRC(is_feasible(wrong, L), Errc::dimension_mismatch);
    }
}

TEST_CASE("linearized spacing set") {
    ArrayLayout L;
    L.M = 2;
    L.N = 3;
    std::mt19937_64 rng(11);
    const double dmin2 = L.min_spacing() * L.min_spacing();

    SUBCASE("anchor slack equals d(p0) - dmin^2 per pair") {
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = random_feasible_placement(L, rng);
            const auto set = linearize_spacing(p, 1, L);
            CHECK(set.halfspaces.size() == 6);  // C(N+1, 2)
            for (const auto& h : set.halfspaces) {
                const Vec2 a = h.n == 0 ? L.active_position(1) : p.point(1, h.n - 1);
                const Vec2 b = p.point(1, h.n_other - 1);
                const double slack = h.offset - h.normal.dot(p.antenna(1));
                CHECK(slack >= 0.0);
                CHECK(std::abs(slack - ((a - b).squaredNorm() - dmin2)) < 1e-12 * dmin2);
            }
        }
    }
    SUBCASE("single coupler gives one half-space with normal 2(q - p)") {
        L.N = 1;
        const auto p = uniform_placement(L);
        const auto set = linearize_spacing(p, 0, L);
        REQUIRE(set.halfspaces.size() == 1);
        const Vec2 expect = 2.0 * (L.active_position(0) - p.point(0, 0));
        CHECK((set.halfspaces[0].normal - expect).norm() < 1e-15);
    }
    SUBCASE("infeasible anchor") {
        auto p = uniform_placement(L);
        p.set_point(0, 0, L.active_position(0));
        CHECK_ERRC(linearize_spacing(p, 0, L), Errc::anchor_infeasible);
    }
    SUBCASE("inner approximation: sampled members are truly feasible") {
        const auto anchor = random_feasible_placement(L, rng);
        const auto set = linearize_spacing(anchor, 0, L);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int members = 0;
        for (int draw = 0; members < 1000 && draw < 2000000; ++draw) {
            Vec x(2 * L.N);
            for (int i = 0; i < x.size(); ++i) x(i) = set.lower(i) + u(rng) * (set.upper(i) - set.lower(i));
            if (!set.contains(x)) continue;
            ++members;
            CHECK(is_feasible_local(x, 0, L).feasible);
        }
        CHECK(members == 1000);
    }
}

TEST_CASE("projection onto the linearized set") {
    ArrayLayout L;
    L.M = 1;
    L.N = 2;
    const double lam = L.lambda();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;

    SUBCASE("members are left in place") {
        const auto p = uniform_placement(L);
        const auto set = linearize_spacing(p, 0, L);
        const auto r = project_onto_set(p.antenna(0), set);
        CHECK((r.point - p.antenna(0)).norm() == 0.0);
    }
    SUBCASE("box violation alone is a clamp") {
        const auto p = uniform_placement(L);
        const auto set = linearize_spacing(p, 0, L);
        Vec x = p.antenna(0);
        x(0) = 5.0 * lam;
        x(3) = -5.0 * lam;
        const auto r = project_onto_set(x, set);
        Vec expect = x.cwiseMax(set.lower).cwiseMin(set.upper);
        REQUIRE(set.contains(expect));
        CHECK((r.point - expect).norm() < 1e-9 * lam);
    }
    SUBCASE("one violated half-space matches the closed form") {
        L.N = 1;
        CouplerPlacement p(1, 1);
        p.set_point(0, 0, Vec2(0.5 * lam, 0.0));
        const auto set = linearize_spacing(p, 0, L);
        Vec x(2);
        x << 0.05 * lam, 0.01 * lam;  // crosses the tangent line, stays in the box
        const auto& h = set.halfspaces[0];
        const double excess = h.normal.dot(x) - h.offset;
        REQUIRE(excess > 0.0);
        const Vec expect = x - excess / h.normal.squaredNorm() * h.normal;
        const auto r = project_onto_set(x, set);
        CHECK((r.point - expect).norm() < 1e-9 * lam);
    }
    SUBCASE("feasible, idempotent and nonexpansive") {
        L.N = 3;
        for (int seed = 0; seed < 1000; ++seed) {
            std::mt19937_64 r(seed);
            const auto anchor = random_feasible_placement(L, r);
            const auto set = linearize_spacing(anchor, 0, L);
            Vec x = anchor.antenna(0), y = anchor.antenna(0);
            for (int i = 0; i < x.size(); ++i) {
                x(i) += 0.5 * lam * g(r);
                y(i) += 0.5 * lam * g(r);
            }
            const Vec px = project_onto_set(x, set).point;
            const Vec py = project_onto_set(y, set).point;
            CHECK(is_feasible_local(px, 0, L).feasible);
            if (seed % 10 == 0) {
                CHECK((project_onto_set(px, set).point - px).norm() <= 1e-8 * lam);
                CHECK((px - py).norm() <= (x - y).norm() * (1.0 + 1e-8) + 1e-8 * lam);
            }
        }
    }
}

}  // TEST_SUITE
