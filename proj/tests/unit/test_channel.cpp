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
#include "fcarray/channel.hpp"
#include "test_helpers.hpp"

using namespace fca;

TEST_SUITE("channel") {

TEST_CASE("active steering vector") {
    ArrayLayout L;
    L.M = 3;
    CHECK((steering_active(0.0, L) - CVec::Ones(3)).norm() == 0.0);

    L.M = 2;
    L.d_y = 0.5;
    CHECK(std::abs(steering_active(kPi / 2, L)(1) - cplx(-1.0, 0.0)) < 1e-15);

    L.d_y = 2.2;
    const cplx expect = std::exp(cplx(0.0, -0.2 * kPi));
    CHECK(std::abs(steering_active(kPi / 6, L)(1) - expect) < 1e-12);
    CHECK(steering_active(0.7, L)(0) == cplx(1.0, 0.0));
}

TEST_CASE("coupler steering vector") {
    ArrayLayout L;
    L.M = 2;
    L.N = 3;
    const double lam = L.lambda();
    std::mt19937_64 rng(1);

    CouplerPlacement origin(L.M, L.N);  // synthetic: everything at the origin
    CHECK((steering_coupler(0.4, origin, lam) - CVec::Ones(6)).norm() == 0.0);

    const auto p = random_feasible_placement(L, rng);
    SUBCASE("broadside phase depends on x only") {
        CouplerPlacement shifted = p;
        for (int m = 0; m < L.M; ++m)
            for (int n = 0; n < L.N; ++n) shifted.set_point(m, n, p.point(m, n) + Vec2(0.0, 0.37 * lam));
        CHECK((steering_coupler(0.0, p, lam) - steering_coupler(0.0, shifted, lam)).norm() < 1e-12);
    }
    SUBCASE("entries match the scalar formula, antenna-major") {
        const CVec a = steering_coupler(kPi / 4, p, lam);
        for (int m = 0; m < L.M; ++m)
            for (int n = 0; n < L.N; ++n) {
                const Vec2 xy = p.point(m, n);
                const cplx ref = std::exp(cplx(0.0, -2.0 * kPi / lam * (xy.x() + xy.y()) / std::sqrt(2.0)));
                CHECK(std::abs(a(m * L.N + n) - ref) < 1e-12);
                CHECK(std::abs(std::abs(a(m * L.N + n)) - 1.0) < 1e-12);
            }
    }
}

TEST_CASE("user channel") {
    ArrayLayout L;
    L.M = 3;
    L.N = 2;
    std::mt19937_64 rng(2);
    const auto p = random_feasible_placement(L, rng);

    SUBCASE("single unit path is the stacked steering vector") {
        MultipathSpec spec;
        spec.users.push_back({Vec::Constant(1, 0.3), CVec::Ones(1), 1.0});
        const auto h = user_channel(spec, 0, p, L);
        CHECK((h.active() - steering_active(0.3, L)).norm() == 0.0);
        for (int i = 0; i < h.h.size(); ++i) CHECK(std::abs(std::abs(h.h(i)) - 1.0) < 1e-12);
    }
    SUBCASE("zero gains") {
        MultipathSpec spec;
        spec.users.push_back({Vec::Constant(4, 0.1), CVec::Zero(4), 1.0});
        CHECK(user_channel(spec, 0, p, L).h.norm() == 0.0);
    }
    SUBCASE("path-by-path summation and linearity") {
        const auto spec = sample_channels(9, 2, 15);
        for (int k = 0; k < 2; ++k) {
            const auto& u = spec.users[k];
            CVec ref = CVec::Zero(L.M * (L.N + 1));
            for (int l = 0; l < u.paths(); ++l) {
                const double phi = u.angles(l);
                for (int m = 0; m < L.M; ++m)
                    ref(m) += u.gains(l) * std::exp(cplx(0.0, -2.0 * kPi * m * L.d_y * std::sin(phi)));
                for (int m = 0; m < L.M; ++m)
                    for (int n = 0; n < L.N; ++n) {
                        const Vec2 xy = p.point(m, n);
                        const double ph = 2.0 * kPi / L.lambda() * (std::cos(phi) * xy.x() + std::sin(phi) * xy.y());
                        ref(L.M + m * L.N + n) += u.gains(l) * std::exp(cplx(0.0, -ph));
                    }
            }
            const auto h = user_channel(spec, k, p, L);
            CHECK((h.h - ref).norm() < 1e-12 * ref.norm());

            MultipathSpec twice = spec;
            twice.users[k].gains *= 2.0;
            CHECK(user_channel(twice, k, p, L).h == 2.0 * h.h);
        }
    }
    SUBCASE("regeneration is bit-exact") {
        const auto spec = sample_channels(4, 1, 5);
        CHECK(user_channel(spec, 0, p, L).h == user_channel(spec, 0, p, L).h);
    }
}

TEST_CASE("channel sampling") {
    const auto a = sample_channels(42, 3, 15);
    const auto b = sample_channels(42, 3, 15);
    for (int k = 0; k < 3; ++k) {
        CHECK(a.users[k].angles == b.users[k].angles);
        CHECK(a.users[k].gains == b.users[k].gains);
    }
    const auto one = sample_channels(1, 1, 1);
    CHECK(std::abs(one.users[0].angles(0)) <= kPi / 2);
    CHECK_NOTHROW(a.validate());
    CHECK_ERRC(sample_channels(1, 0, 3), Errc::config);

    // E[sum |alpha|^2] = g0.
    double acc = 0.0;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) acc += sample_channels(1000 + s, 1, 15, 2.0).users[0].gains.squaredNorm();
    CHECK(std::abs(acc / draws - 2.0) < 0.03 * 2.0);

    MultipathSpec bad = a;
    bad.users[0].angles(0) = 2.0;
    CHECK_ERRC(bad.validate(), Errc::config);
}

}  // TEST_SUITE
