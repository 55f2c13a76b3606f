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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fcarray/experiment.hpp"
#include "test_helpers.hpp"

using namespace fca;

namespace {

Scenario small() {
    Scenario s;
    s.layout.M = 3;
    s.layout.N = 2;
    s.K = 2;
    s.rate_trials = 3;
    s.nmse_trials = 2;
    s.T_max = 15;
    s.power_dbm = {20.0, 30.0};
    s.snr_grid = {0.0, 10.0};
    s.G = 64;
    s.L = 3;
    s.D = 16;
    return s;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("configuration") {
    SUBCASE("defaults survive a JSON round trip") {
        const Scenario s = scenario_from_json(scenario_json(Scenario{}), {});
        CHECK(scenario_json(s) == scenario_json(Scenario{}));
    }
    SUBCASE("unknown field") {
        try {
            scenario_from_json(R"({"layout": {"Q": 3}})", {});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::config);
            CHECK(std::string(e.what()).find("layout.Q") != std::string::npos);
        }
    }
    SUBCASE("wrong type") {
        CHECK_ERRC(scenario_from_json(R"({"layout": {"M": "four"}})", {}), Errc::config);
    }
    SUBCASE("overrides") {
        const Scenario s = scenario_from_json(R"({"layout": {"M": 5}})", {"layout.N=3", "channel.K=4"});
        CHECK(s.layout.M == 5);
        CHECK(s.layout.N == 3);
        CHECK(s.K == 4);
        CHECK_ERRC(scenario_from_json("{}", {"layout.M"}), Errc::config);
        CHECK_ERRC(scenario_from_json("{}", {"layout.M=0"}), Errc::config);
    }
    SUBCASE("derived noise") {
        Scenario s;
        CHECK(s.p_max() == doctest::Approx(1.0));
        CHECK(s.sigma2() == doctest::Approx(1.0 / (3 * 1000.0)));
    }
    SUBCASE("axes") {
        CHECK(parse_axis("power") == SweepAxis::power);
        CHECK(std::string(to_string(SweepAxis::pilot)) == "pilot");
        CHECK_ERRC(parse_axis("nope"), Errc::config);
    }
}

TEST_CASE("seed streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("sweeps") {
    Scenario s = small();
    SUBCASE("power sweep is independent of the worker count") {
        std::ostringstream a, b;
        write_csv(a, run_sweep(s, SweepAxis::power));
        s.workers = 3;
        write_csv(b, run_sweep(s, SweepAxis::power));
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("seed,axis,value,scheme,metric,result\n", 0) == 0);
    }
    SUBCASE("optimized couplers never lose to the starting placement") {
        const auto t = run_sweep(s, SweepAxis::power);
        for (const auto& r : t.rows) {
            if (r.scheme != "fc-optimized" || r.metric != "sum_rate") continue;
            for (const auto& q : t.rows)
                if (q.scheme == "fixed-coupler" && q.seed == r.seed && q.value == r.value)
                    CHECK(r.result >= q.result);
        }
    }
    SUBCASE("region rows carry the coupler count") {
        s.region = {1.0};
        s.rate_trials = 1;
        s.schemes = {"fixed-coupler"};
        const auto t = run_sweep(s, SweepAxis::region);
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0].scheme == "fixed-coupler:N=2");
        CHECK(t.rows[1].scheme == "fixed-coupler:N=3");
    }
    SUBCASE("estimation sweep") {
        const auto t = run_sweep(s, SweepAxis::snr);
        int nmse_rows = 0;
        for (const auto& r : t.rows)
            if (r.metric == "nmse") {
                ++nmse_rows;
                CHECK(r.result >= 0.0);
            }
        CHECK(nmse_rows == 2 * 2 * 3);
    }
}

TEST_CASE("heatmap") {
    Scenario s;
    s.layout.M = 5;
    s.layout.N = 1;
    s.K = 1;
    s.heatmap_resolution = 41;
    s.T_max = 40;
    const Heatmap map = heatmap(s, 3);
    const int R = map.resolution;
    auto at = [&](int ix, int iy) { return map.cells[static_cast<size_t>(iy) * R + ix].gain_db; };

    int maxima = 0, feasible = 0;
    for (int iy = 0; iy < R; ++iy)
        for (int ix = 0; ix < R; ++ix) {
            if (std::isnan(at(ix, iy))) continue;
            ++feasible;
            if (ix == 0 || iy == 0 || ix == R - 1 || iy == R - 1) continue;
            bool peak = true;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if ((dx || dy) && !(at(ix, iy) > at(ix + dx, iy + dy))) peak = false;
            maxima += peak;
        }
    CHECK(feasible > R * R / 2);
    CHECK(maxima >= 2);

    // Continuity of the underlying gain.
    const ArrayLayout& L = s.layout;
    const auto spec = sample_channels(derive_seed(3, 0), 1, s.L);
    Vec p(2);
    p << 0.6 * L.lambda(), 0.3 * L.lambda();
    const double g0 = antenna_gain_db(spec, 0, p, L, s.dipole());
    p(0) += 1e-6 * L.lambda();
    CHECK(std::abs(antenna_gain_db(spec, 0, p, L, s.dipole()) - g0) < 1e-3);

    REQUIRE(map.trajectory.size() >= 2);
    CHECK(map.trajectory.back().rate >= map.trajectory.front().rate);
    CHECK(map.trajectory.back().array_gain_db >= map.trajectory.front().array_gain_db - 1e-9);

    std::ostringstream os;
    write_heatmap_csv(os, map);
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == R * R + 1);

    s.layout.N = 2;
    CHECK_ERRC(heatmap(s, 3), Errc::config);
}

TEST_CASE("placement file") {
    ArrayLayout L;
    L.M = 3;
    L.N = 2;
    std::mt19937_64 rng(4);
    const auto p = random_feasible_placement(L, rng);
    CHECK(placement_from_json(placement_json(p, L), L) == p);
    ArrayLayout other = L;
    other.N = 3;
    CHECK_ERRC(placement_from_json(placement_json(p, L), other), Errc::config);
}

}  // TEST_SUITE
