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
#include <iosfwd>
#include <string>
#include <vector>

#include "fcarray/chanest.hpp"
#include "fcarray/optimizer.hpp"

namespace fca {

/// One experiment configuration. Every field has a default and every default
/// is written to the manifest. Powers are in dBm and lengths in wavelengths
/// here; conversion to SI happens when a run is built.
struct Scenario {
    ArrayLayout layout{6, 2, 2.2, 2.0, 0.15, 7.0e9};
    cplx self_impedance{73.13, 42.54};
    cplx load_impedance{0.05, 50.0};
    int K = 3;
    int L = 15;

    // Rate experiments. snr_db fixes sigma^2 = P_max / (K 10^(snr/10)) at the
    // scenario's own P_max and K; sweeps keep that sigma^2.
    double p_max_dbm = 30.0;
    double snr_db = 30.0;
    std::vector<double> power_dbm{10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0};
    std::vector<int> users{1, 2, 3, 4, 5};
    std::vector<double> region{0.5, 1.0, 2.0};
    std::vector<int> couplers{2, 3};

    // Optimizer; eta0 = eta0_scale / lambda^2.
    double eta0_scale = 10.0;
    double backtrack_factor = 2.0;
    int max_backtracks = 5;
    std::string alpha_rule = "diminishing";
    double alpha_constant = 1.0;
    double eps_stop = 1e-4;
    int T_max = 200;
    double fd_step = 1e-4;  ///< wavelengths

    // Estimation experiments; the estimation SNR is 1/sigma_m^2 with unit
    // pilot power.
    int V = 4;
    int tau = 13;
    int G = 256;
    double eta = 4.0;
    double eps_n = 1e-12;
    int D = 400;
    double est_snr_db = 0.0;
    std::vector<double> snr_grid{-10.0, 0.0, 10.0, 20.0};
    std::vector<int> tau_grid{4, 13, 32};
    int eval_placements = 10;

    int heatmap_antenna = 0;
    int heatmap_resolution = 201;

    std::uint64_t first_seed = 0;
    int rate_trials = 50;
    int nmse_trials = 200;
    std::vector<std::string> schemes{"fc-optimized", "fixed-coupler", "active-only", "fully-active",
                                     "centralized",  "distributed",   "exhaustive"};
    int workers = 1;

    /// Throws Errc::config naming the offending field.
    void validate() const;

    DipoleModel dipole() const;
    SCAConfig sca_config() const;
    double p_max() const;   ///< watts
    double sigma2() const;  ///< rate-experiment noise variance
    bool has_scheme(const std::string& s) const;
};

/// Schemes understood by rate sweeps and by estimation sweeps.
const std::vector<std::string>& rate_schemes();
const std::vector<std::string>& estimation_schemes();

/// Defaults, then the JSON file (if path is nonempty), then "a.b=value"
/// overrides. Unknown fields and wrong types raise Errc::config with the
/// dotted path.
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides);
Scenario scenario_from_json(const std::string& text, const std::vector<std::string>& overrides);

/// Pretty-printed JSON of every field.
std::string scenario_json(const Scenario& s);

enum class SweepAxis { power, users, region, snr, pilot };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis a);

struct ResultRow {
    std::uint64_t seed = 0;
    double value = 0.0;   ///< axis value
    std::string scheme;   ///< region sweeps append ":N=<n>"
    std::string metric;
    double result = 0.0;
};

struct ResultTable {
    SweepAxis axis = SweepAxis::power;
    std::vector<ResultRow> rows;
};

/// Independent per-seed trials spread over scenario.workers threads and
/// merged in seed order, so the table does not depend on the worker count.
ResultTable run_sweep(const Scenario& scenario, SweepAxis axis);

/// All rows of one (seed, axis value) pair; run_sweep concatenates these.
std::vector<ResultRow> run_point(const Scenario& scenario, SweepAxis axis, std::uint64_t seed,
                                 double value);

/// Header "seed,axis,value,scheme,metric,result"; doubles at round-trip
/// precision.
void write_csv(std::ostream& os, const ResultTable& table);

/// Seed of an independent random stream of one trial.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Channel power gain of antenna m through its couplers, relative to the bare
/// active element: sum_k |G(k, m)|^2 Re{z_self} / b_m, in dB.
double antenna_gain_db(const MultipathSpec& spec, int m, const Vec& p_m, const ArrayLayout& layout,
                       const DipoleModel& dipole);

/// The same summed over all antennas.
double array_gain_db(const MultipathSpec& spec, const CouplerPlacement& placement,
                     const ArrayLayout& layout, const DipoleModel& dipole);

struct HeatmapCell {
    double x = 0.0;  ///< offset from the active element, wavelengths
    double y = 0.0;
    double gain_db = 0.0;  ///< NaN where the coupler would violate d_min
};

struct TrajectoryPoint {
    int t = 0;
    double x = 0.0;
    double y = 0.0;
    double antenna_gain_db = 0.0;
    double array_gain_db = 0.0;
    double rate = 0.0;
};

struct Heatmap {
    int resolution = 0;
    std::vector<HeatmapCell> cells;  ///< row-major, y outer
    std::vector<TrajectoryPoint> trajectory;
};

/// Gain of the chosen antenna over its movement region, plus the optimizer's
/// path of the same coupler from the uniform start. Requires N = 1.
Heatmap heatmap(const Scenario& scenario, std::uint64_t seed);

void write_heatmap_csv(std::ostream& os, const Heatmap& map);
void write_trajectory_csv(std::ostream& os, const Heatmap& map);

/// Placement as JSON: layout header, then M x N x [x, y] in meters.
std::string placement_json(const CouplerPlacement& placement, const ArrayLayout& layout);
CouplerPlacement placement_from_json(const std::string& text, const ArrayLayout& layout);

/// Iteration log: t, rate, accepted, backtracks, eta, alpha, broadcast, upload.
void write_trace_csv(std::ostream& os, const SCATrace& trace);

std::string version();

}  // namespace fca
